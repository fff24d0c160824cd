#include "quant/representations.hpp"

#include "quant/fft.hpp"

#include <algorithm>
#include <complex>
#include <iostream>
#include <stdexcept>

namespace quant {

std::string_view representation_name(RepresentationId id) {
    switch (id) {
    case RepresentationId::raw: return "raw";
    case RepresentationId::diff1: return "diff1";
    case RepresentationId::diff2: return "diff2";
    case RepresentationId::fourier: return "fft";
    }
    return "?";
}

std::optional<RepresentationId> parse_representation(std::string_view token) {
    if (token == "raw") return RepresentationId::raw;
    if (token == "diff1") return RepresentationId::diff1;
    if (token == "diff2") return RepresentationId::diff2;
    if (token == "fft" || token == "fourier") return RepresentationId::fourier;
    return std::nullopt;
}

RepSet parse_representation_set(std::string_view text) {
    RepSet set;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t sep = text.find_first_of(",+", pos);
        const std::string_view token =
            text.substr(pos, sep == std::string_view::npos ? std::string_view::npos : sep - pos);
        if (!token.empty()) {
            const auto id = parse_representation(token);
            if (!id) {
                throw std::invalid_argument("unknown representation '" + std::string(token) +
                                            "' (expected raw, diff1, diff2 or fft)");
            }
            set.insert(*id);
        }
        if (sep == std::string_view::npos) break;
        pos = sep + 1;
    }
    if (set.empty()) throw std::invalid_argument("representation set is empty");
    return set;
}

std::string format_representation_set(RepSet set) {
    std::string out;
    for (const auto id : kRepresentationOrder) {
        if (!set.contains(id)) continue;
        if (!out.empty()) out += ',';
        out += representation_name(id);
    }
    return out;
}

std::size_t representation_length(RepresentationId id, std::size_t n) {
    switch (id) {
    case RepresentationId::raw: return n;
    case RepresentationId::diff1: return n >= 2 ? n - 1 : 0;
    case RepresentationId::diff2: return n >= 3 ? n - 2 : 0;
    case RepresentationId::fourier: return n >= 1 ? n / 2 + 1 : 0;
    }
    return 0;
}

std::vector<double> first_difference(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("first_difference needs length >= 2");
    std::vector<double> out(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) out[i] = x[i + 1] - x[i];
    return out;
}

std::vector<double> second_difference(std::span<const double> x) {
    if (x.size() < 3) throw std::invalid_argument("second_difference needs length >= 3");
    std::vector<double> out(x.size() - 2);
    // evaluated as nested first differences so the two agree bit for bit
    for (std::size_t i = 0; i + 2 < x.size(); ++i) {
        out[i] = (x[i + 2] - x[i + 1]) - (x[i + 1] - x[i]);
    }
    return out;
}

std::vector<double> moving_average(std::span<const double> x, int window) {
    if (window < 1 || window % 2 == 0) {
        throw std::invalid_argument("moving average window must be odd and >= 1, got " +
                                    std::to_string(window));
    }
    const std::size_t n = x.size();
    if (window == 1 || n == 0) return {x.begin(), x.end()};

    // prefix sums; window is clipped to [0, n) at the edges
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];

    const std::size_t half = static_cast<std::size_t>(window / 2);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<double> dft_magnitude(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("dft_magnitude needs length >= 1");
    std::vector<std::complex<double>> in(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) in[i] = {x[i], 0.0};
    const auto spectrum = fft::dft(in);
    std::vector<double> out(x.size() / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::abs(spectrum[k]);
    return out;
}

RepresentationSet build_representations(const TimeSeries& x, const RepresentationConfig& config) {
    if (config.active.empty()) {
        throw std::invalid_argument("no input representations selected");
    }
    const std::size_t n = x.size();
    RepresentationSet set;
    for (const auto id : kRepresentationOrder) {
        if (!config.active.contains(id)) continue;
        if (representation_length(id, n) == 0) {
            set.skipped.push_back(id);
            std::cerr << "warning: series length " << n << " too short for representation "
                      << representation_name(id) << "; skipping it\n";
            continue;
        }
        auto& slot = set.values[static_cast<std::size_t>(id)];
        switch (id) {
        case RepresentationId::raw:
            slot.assign(x.values().begin(), x.values().end());
            break;
        case RepresentationId::diff1:
            slot = moving_average(first_difference(x.values()), config.smoothing_window);
            break;
        case RepresentationId::diff2:
            slot = second_difference(x.values());
            break;
        case RepresentationId::fourier:
            slot = dft_magnitude(x.values());
            break;
        }
        set.present.insert(id);
    }
    return set;
}

} // namespace quant
