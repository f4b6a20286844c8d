#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace psychoak {

// In-place radix-2 FFT. Size must be a power of two.
void fft(std::vector<std::complex<double>>& a, bool inverse = false);

std::size_t next_pow2(std::size_t n);

// Real-input FFT, zero-padded to nfft (power of two). Returns bins 0..nfft/2.
std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t nfft);

}  // namespace psychoak
