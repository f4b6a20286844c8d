#include "psychoak/resample.hpp"

#include <cmath>
#include <numbers>

namespace psychoak {

namespace {

double bessel_i0(double x) {
    // power series, converges quickly for the argument range of a window
    double sum = 1.0, term = 1.0;
    const double x2 = x * x / 4.0;
    for (int k = 1; k < 64; ++k) {
        term *= x2 / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return sum;
}

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

constexpr int kHalfTaps = 32;  // 64-tap kernel
constexpr double kBeta = 8.0;

}  // namespace

double kaiser_window(double x, double beta) {
    if (std::abs(x) > 1.0) return 0.0;
    return bessel_i0(beta * std::sqrt(1.0 - x * x)) / bessel_i0(beta);
}

std::vector<double> resample(std::span<const double> x, double fs_in, double fs_out) {
    if (x.empty()) return {};
    if (fs_in == fs_out) return {x.begin(), x.end()};

    const double ratio = fs_out / fs_in;
    // cutoff relative to the input rate; < 1 when downsampling
    const double cutoff = std::min(1.0, ratio) * 0.97;
    const double half_width = kHalfTaps / std::min(1.0, ratio);

    const auto n_in = static_cast<long>(x.size());
    const auto n_out =
        static_cast<std::size_t>(std::llround(static_cast<double>(x.size()) * ratio));
    std::vector<double> out(n_out);

    for (std::size_t m = 0; m < n_out; ++m) {
        const double t = static_cast<double>(m) / ratio;  // position in input samples
        const long k0 = static_cast<long>(std::ceil(t - half_width));
        const long k1 = static_cast<long>(std::floor(t + half_width));
        double acc = 0.0;
        for (long k = std::max(0L, k0); k <= std::min(n_in - 1, k1); ++k) {
            const double u = static_cast<double>(k) - t;
            acc += x[static_cast<std::size_t>(k)] * cutoff * sinc(cutoff * u) *
                   kaiser_window(u / half_width, kBeta);
        }
        out[m] = acc;
    }
    return out;
}

}  // namespace psychoak
