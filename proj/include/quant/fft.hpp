#pragma once

#include <complex>
#include <vector>

namespace quant::fft {

/// In-place radix-2 FFT; size of a must be a power of two (or empty).
void transform_pow2(std::vector<std::complex<double>>& a, bool inverse);

/// Forward DFT of arbitrary size. Powers of two go through the radix-2
/// path directly; other sizes use Bluestein's chirp-z algorithm, which
/// evaluates the exact length-n DFT (no zero padding of the input).
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x);

} // namespace quant::fft
