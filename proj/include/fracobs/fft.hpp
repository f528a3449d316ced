#pragma once

// Thin real-to-complex FFT wrapper over FFTW. Plans are cached per length
// behind a mutex; every transform runs on call-local buffers.

#include <complex>
#include <span>
#include <vector>

namespace fracobs::fft {

using Spectrum = std::vector<std::complex<double>>;

/// Unnormalized forward transform, returns n/2 + 1 coefficients.
Spectrum forward(std::span<const double> values);

/// Inverse of forward(): includes the 1/n normalization.
std::vector<double> inverse(const Spectrum& coefficients, std::size_t n);

/// Signed integer wavenumber of DFT index k for length n.
inline long wavenumber(std::size_t k, std::size_t n) {
  return k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

}  // namespace fracobs::fft
