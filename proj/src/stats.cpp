#include "quant/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace quant {

namespace {

constexpr std::size_t kExactLimit = 25;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Null distribution of 2*W+ for n ranks given as doubled (integer) values.
/// Each rank joins the positive sum independently with probability 1/2.
double exact_two_sided_p(const std::vector<std::int64_t>& doubled_ranks, double w_plus) {
    const std::int64_t total =
        std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), std::int64_t{0});
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(total) + 1, 0);
    counts[0] = 1;
    std::int64_t reach = 0;
    for (const auto r : doubled_ranks) {
        reach += r;
        for (std::int64_t s = reach; s >= r; --s) {
            counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - r)];
        }
    }

    const auto w2 = static_cast<std::int64_t>(std::llround(2.0 * w_plus));
    std::uint64_t at_most = 0, at_least = 0;
    for (std::int64_t s = 0; s <= total; ++s) {
        const auto c = counts[static_cast<std::size_t>(s)];
        if (s <= w2) at_most += c;
        if (s >= w2) at_least += c;
    }
    const double denom = std::ldexp(1.0, static_cast<int>(doubled_ranks.size()));
    const double tail = static_cast<double>(std::min(at_most, at_least)) / denom;
    return std::min(1.0, 2.0 * tail);
}

} // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences) {
    std::vector<double> nonzero;
    nonzero.reserve(differences.size());
    for (const double d : differences) {
        if (!std::isfinite(d)) throw std::invalid_argument("non-finite difference");
        if (d != 0.0) nonzero.push_back(d);
    }

    WilcoxonResult result;
    result.n_used = nonzero.size();
    if (nonzero.empty()) {
        result.exact = true;
        return result;
    }

    const std::size_t n = nonzero.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(nonzero[a]) < std::abs(nonzero[b]);
    });

    // average ranks over ties; track doubled ranks so they stay integral
    std::vector<std::int64_t> doubled(n, 0);
    double tie_correction = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && std::abs(nonzero[order[j]]) == std::abs(nonzero[order[i]])) ++j;
        const std::int64_t doubled_rank = static_cast<std::int64_t>(i + j + 1); // 2*avg rank
        for (std::size_t k = i; k < j; ++k) doubled[order[k]] = doubled_rank;
        const double t = static_cast<double>(j - i);
        tie_correction += t * t * t - t;
        i = j;
    }

    double w_plus = 0.0;
    std::vector<std::int64_t> doubled_ranks(n);
    for (std::size_t k = 0; k < n; ++k) {
        doubled_ranks[k] = doubled[k];
        if (nonzero[k] > 0.0) w_plus += 0.5 * static_cast<double>(doubled[k]);
    }
    result.statistic = w_plus;

    if (n <= kExactLimit) {
        result.exact = true;
        result.p_value = exact_two_sided_p(doubled_ranks, w_plus);
        return result;
    }

    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    const double variance = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_correction / 48.0;
    const double sigma = std::sqrt(variance);
    const double p_low = normal_cdf((w_plus - mean + 0.5) / sigma);
    const double p_high = 1.0 - normal_cdf((w_plus - mean - 0.5) / sigma);
    result.p_value = std::min(1.0, 2.0 * std::min(p_low, p_high));
    return result;
}

namespace {

using Key = std::pair<std::string, std::uint32_t>;

std::map<Key, double> index_results(const std::vector<ResultRow>& rows, const char* which) {
    std::map<Key, double> out;
    for (const auto& row : rows) {
        const auto [it, inserted] = out.emplace(Key{row.dataset, row.resample}, row.accuracy);
        if (!inserted) {
            throw std::runtime_error(std::string("duplicate key (") + row.dataset + ", " +
                                     std::to_string(row.resample) + ") in " + which + " results");
        }
    }
    return out;
}

} // namespace

ComparisonReport compare_results(const std::vector<ResultRow>& first,
                                 const std::vector<ResultRow>& second) {
    const auto a = index_results(first, "first");
    const auto b = index_results(second, "second");

    std::string missing;
    for (const auto& [key, value] : a) {
        if (!b.count(key)) {
            missing += " (" + key.first + ", " + std::to_string(key.second) + ") only in first;";
        }
    }
    for (const auto& [key, value] : b) {
        if (!a.count(key)) {
            missing += " (" + key.first + ", " + std::to_string(key.second) + ") only in second;";
        }
    }
    if (!missing.empty()) {
        throw std::runtime_error("results do not cover the same (dataset, resample) keys:" +
                                 missing);
    }
    if (a.empty()) throw std::runtime_error("no results to compare");

    // per-dataset means over resamples; std::map keeps datasets in name order
    std::map<std::string, std::pair<double, std::size_t>> mean_a, mean_b;
    for (const auto& [key, value] : a) {
        auto& acc = mean_a[key.first];
        acc.first += value;
        ++acc.second;
    }
    for (const auto& [key, value] : b) {
        auto& acc = mean_b[key.first];
        acc.first += value;
        ++acc.second;
    }

    ComparisonReport report;
    std::vector<double> diffs;
    for (const auto& [dataset, acc] : mean_a) {
        const double ma = acc.first / static_cast<double>(acc.second);
        const auto& bacc = mean_b.at(dataset);
        const double mb = bacc.first / static_cast<double>(bacc.second);
        const double diff = ma - mb;
        diffs.push_back(diff);
        if (diff > 0.0) ++report.wins;
        else if (diff < 0.0) ++report.losses;
        else ++report.draws;
    }
    report.dataset_count = diffs.size();
    report.mean_difference =
        std::accumulate(diffs.begin(), diffs.end(), 0.0) / static_cast<double>(diffs.size());
    report.wilcoxon = wilcoxon_signed_rank(diffs);
    return report;
}

} // namespace quant
