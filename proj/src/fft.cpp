#include "quant/fft.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace quant::fft {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

} // namespace

void transform_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wstep{std::cos(angle), std::sin(angle)};
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wstep;
            }
        }
    }

    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= inv;
    }
}

std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    if (n <= 1) return x;

    if (is_pow2(n)) {
        auto a = x;
        transform_pow2(a, false);
        return a;
    }

    // Bluestein: X_k = w_k * (a (*) b)_k with a_j = x_j w_j, b_j = conj(w_j),
    // w_j = exp(-i pi j^2 / n). Angles use j^2 mod 2n to keep sin/cos arguments
    // small; j^2 has period 2n in the chirp.
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<std::complex<double>> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t j2 = (static_cast<std::uint64_t>(j) * j) % (2 * n);
        const double angle = -std::numbers::pi * static_cast<double>(j2) / static_cast<double>(n);
        chirp[j] = {std::cos(angle), std::sin(angle)};
    }

    std::vector<std::complex<double>> a(m), b(m);
    for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * chirp[j];
    b[0] = std::conj(chirp[0]);
    for (std::size_t j = 1; j < n; ++j) {
        b[j] = std::conj(chirp[j]);
        b[m - j] = b[j]; // symmetric kernel, wrapped for circular convolution
    }

    transform_pow2(a, false);
    transform_pow2(b, false);
    for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
    transform_pow2(a, true);

    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
    return out;
}

} // namespace quant::fft
