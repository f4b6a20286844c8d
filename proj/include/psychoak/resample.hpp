#pragma once

#include <span>
#include <vector>

namespace psychoak {

// Band-limited rate conversion: windowed-sinc kernel, 64 taps, Kaiser beta=8.
// The kernel is stretched when downsampling so the cutoff tracks the output
// Nyquist frequency.
std::vector<double> resample(std::span<const double> x, double fs_in, double fs_out);

double kaiser_window(double x, double beta);  // x in [-1, 1]

}  // namespace psychoak
