#include "psychoak/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace psychoak {

namespace {

using cplx = std::complex<double>;

// Analog Butterworth low-pass prototype poles (cutoff 1 rad/s), left half plane.
std::vector<cplx> prototype_poles(int order) {
    std::vector<cplx> poles;
    poles.reserve(order);
    for (int k = 0; k < order; ++k) {
        const double theta =
            std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order);
        poles.emplace_back(std::cos(theta), std::sin(theta));
    }
    return poles;
}

cplx bilinear(cplx s) { return (1.0 + s) / (1.0 - s); }

// Pair complex-conjugate z-plane poles into denominators of real biquads.
std::vector<Biquad> pair_poles(std::vector<cplx> poles) {
    std::vector<Biquad> sections;
    while (!poles.empty()) {
        const cplx p = poles.back();
        poles.pop_back();
        if (poles.empty())
            throw std::runtime_error("pair_poles: odd pole count");
        // find the closest conjugate partner
        std::size_t best = 0;
        double best_d = 1e300;
        for (std::size_t i = 0; i < poles.size(); ++i) {
            const double d = std::abs(poles[i] - std::conj(p));
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        const cplx q = poles[best];
        poles.erase(poles.begin() + static_cast<std::ptrdiff_t>(best));
        Biquad s;
        s.a1 = -(p + q).real();
        s.a2 = (p * q).real();
        sections.push_back(s);
    }
    return sections;
}

double warp(double f, double fs) {
    const double fn = std::clamp(f, 1e-6, 0.499 * fs);
    return std::tan(std::numbers::pi * fn / fs);
}

}  // namespace

std::complex<double> BiquadCascade::response(double f, double fs) const {
    const cplx z = std::polar(1.0, -2.0 * std::numbers::pi * f / fs);
    cplx h(gain, 0.0);
    for (const auto& s : sections) {
        h *= (s.b0 + s.b1 * z + s.b2 * z * z) / (1.0 + s.a1 * z + s.a2 * z * z);
    }
    return h;
}

BiquadCascade butter_lowpass(int order, double fc, double fs) {
    if (order < 2 || order % 2 != 0)
        throw std::invalid_argument("butter_lowpass: order must be even and >= 2");
    const double w = warp(fc, fs);
    std::vector<cplx> zpoles;
    for (cplx p : prototype_poles(order)) zpoles.push_back(bilinear(w * p));
    BiquadCascade c;
    c.sections = pair_poles(std::move(zpoles));
    for (auto& s : c.sections) {
        s.b0 = 1.0;
        s.b1 = 2.0;
        s.b2 = 1.0;
    }
    const double g = std::abs(c.response(0.0, fs));
    c.gain = 1.0 / g;
    return c;
}

BiquadCascade butter_highpass(int order, double fc, double fs) {
    if (order < 2 || order % 2 != 0)
        throw std::invalid_argument("butter_highpass: order must be even and >= 2");
    const double w = warp(fc, fs);
    std::vector<cplx> zpoles;
    for (cplx p : prototype_poles(order)) zpoles.push_back(bilinear(w / p));
    BiquadCascade c;
    c.sections = pair_poles(std::move(zpoles));
    for (auto& s : c.sections) {
        s.b0 = 1.0;
        s.b1 = -2.0;
        s.b2 = 1.0;
    }
    const double g = std::abs(c.response(fs / 2.0, fs));
    c.gain = 1.0 / g;
    return c;
}

BiquadCascade butter_bandpass(int prototype_order, double f_lo, double f_hi, double fs) {
    if (prototype_order < 1)
        throw std::invalid_argument("butter_bandpass: prototype order must be >= 1");
    if (!(f_lo > 0.0) || !(f_hi > f_lo))
        throw std::invalid_argument("butter_bandpass: need 0 < f_lo < f_hi");
    const double w1 = warp(f_lo, fs);
    const double w2 = warp(f_hi, fs);
    const double bw = w2 - w1;
    const double w0sq = w1 * w2;

    std::vector<cplx> zpoles;
    for (cplx p : prototype_poles(prototype_order)) {
        const cplx bp = bw * p;
        const cplx disc = std::sqrt(bp * bp - 4.0 * w0sq);
        zpoles.push_back(bilinear((bp + disc) / 2.0));
        zpoles.push_back(bilinear((bp - disc) / 2.0));
    }
    BiquadCascade c;
    c.sections = pair_poles(std::move(zpoles));
    // n zeros at z=1 and n at z=-1: one (1 - z^-2) numerator per section
    for (auto& s : c.sections) {
        s.b0 = 1.0;
        s.b1 = 0.0;
        s.b2 = -1.0;
    }
    const double f0 = fs / std::numbers::pi * std::atan(std::sqrt(w0sq));
    const double g = std::abs(c.response(f0, fs));
    c.gain = 1.0 / g;
    return c;
}

}  // namespace psychoak
