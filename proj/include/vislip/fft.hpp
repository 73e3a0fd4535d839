#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace vislip::fft {

using Complex = std::complex<double>;

/// Real-to-half-complex forward DFT (unnormalised), n/2+1 bins.
std::vector<Complex> rfft(std::span<const double> signal);

/// Inverse of rfft; divides by n so irfft(rfft(x)) == x.
std::vector<double> irfft(std::span<const Complex> spectrum, std::size_t n);

/// Sum over the full (two-sided) DFT of |X_k|^2, reconstructed from half spectrum.
double two_sided_energy(std::span<const Complex> half_spectrum, std::size_t n);

}  // namespace vislip::fft
