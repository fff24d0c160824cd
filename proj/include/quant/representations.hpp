#pragma once

#include "quant/series.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace quant {

/// The four input representations: the series itself, its smoothed first
/// difference, its second difference, and the magnitude spectrum of its DFT.
enum class RepresentationId : std::uint8_t { raw = 0, diff1 = 1, diff2 = 2, fourier = 3 };

inline constexpr std::array<RepresentationId, 4> kRepresentationOrder = {
    RepresentationId::raw, RepresentationId::diff1, RepresentationId::diff2,
    RepresentationId::fourier};

std::string_view representation_name(RepresentationId id); // "raw","diff1","diff2","fft"
std::optional<RepresentationId> parse_representation(std::string_view token);

/// Small set of RepresentationId values.
class RepSet {
public:
    constexpr RepSet() = default;

    static constexpr RepSet all() { return from_bits(0x0f); }
    static constexpr RepSet from_bits(std::uint8_t bits) {
        RepSet s;
        s.bits_ = bits & 0x0f;
        return s;
    }

    constexpr std::uint8_t bits() const { return bits_; }
    constexpr bool contains(RepresentationId id) const {
        return (bits_ >> static_cast<int>(id)) & 1;
    }
    constexpr void insert(RepresentationId id) { bits_ |= std::uint8_t(1 << static_cast<int>(id)); }
    constexpr void erase(RepresentationId id) { bits_ &= std::uint8_t(~(1 << static_cast<int>(id))); }
    constexpr int count() const {
        int c = 0;
        for (int i = 0; i < 4; ++i) c += (bits_ >> i) & 1;
        return c;
    }
    constexpr bool empty() const { return bits_ == 0; }

    friend constexpr bool operator==(RepSet, RepSet) = default;

private:
    std::uint8_t bits_ = 0;
};

/// Parse "raw,diff1,fft" (',' or '+' separated). Throws on unknown tokens.
RepSet parse_representation_set(std::string_view text);
std::string format_representation_set(RepSet set);

/// Derived length for input length n: raw n, diff1 n-1, diff2 n-2,
/// fourier floor(n/2)+1. Returns 0 when the representation needs a longer
/// series than n.
std::size_t representation_length(RepresentationId id, std::size_t n);

struct RepresentationConfig {
    RepSet active = RepSet::all();
    int smoothing_window = 5; // applied to diff1 only
};

struct RepresentationSet {
    std::array<std::vector<double>, 4> values; // indexed by RepresentationId
    RepSet present;
    std::vector<RepresentationId> skipped; // requested but infeasible at this length

    std::span<const double> of(RepresentationId id) const {
        return values[static_cast<std::size_t>(id)];
    }
};

/// out[i] = x[i+1] - x[i]; requires x.size() >= 2.
std::vector<double> first_difference(std::span<const double> x);

/// out[i] = (x[i+2] - x[i+1]) - (x[i+1] - x[i]), identical bit for bit to
/// first_difference applied twice; requires x.size() >= 3.
std::vector<double> second_difference(std::span<const double> x);

/// Centered moving average with window truncated at the edges; output has the
/// input's length. window must be odd and >= 1.
std::vector<double> moving_average(std::span<const double> x, int window);

/// Magnitudes of the non-redundant half spectrum: |sum_t x[t] e^{-2pi i k t/n}|
/// for k = 0..floor(n/2). Coefficients are not normalised by n.
std::vector<double> dft_magnitude(std::span<const double> x);

/// Compute the requested representations of x. Representations whose length
/// precondition fails are skipped (recorded in .skipped, warning on stderr)
/// rather than failing the run. Throws if config.active is empty.
RepresentationSet build_representations(const TimeSeries& x, const RepresentationConfig& config);

} // namespace quant
