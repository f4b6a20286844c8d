#pragma once

#include <complex>
#include <span>
#include <vector>

namespace psychoak {

// Second-order IIR section, direct form II transposed.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
    double s1 = 0.0, s2 = 0.0;

    double process(double x) {
        const double y = b0 * x + s1;
        s1 = b1 * x - a1 * y + s2;
        s2 = b2 * x - a2 * y;
        return y;
    }
    void reset() { s1 = s2 = 0.0; }

    double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }

    // Set the delay line to the steady state reached under constant input u;
    // returns the corresponding steady output.
    double prime(double u) {
        const double y = dc_gain() * u;
        s1 = y - b0 * u;
        s2 = b2 * u - a2 * y;
        return y;
    }
};

struct BiquadCascade {
    std::vector<Biquad> sections;
    double gain = 1.0;

    double process(double x) {
        double y = gain * x;
        for (auto& s : sections) y = s.process(y);
        return y;
    }
    void process(std::span<const double> in, std::span<double> out) {
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = process(in[i]);
    }
    std::vector<double> run(std::span<const double> in) {
        std::vector<double> out(in.size());
        process(in, out);
        return out;
    }
    void reset() {
        for (auto& s : sections) s.reset();
    }
    // Steady-state initialization for constant input u.
    void prime(double u) {
        double v = gain * u;
        for (auto& s : sections) v = s.prime(v);
    }
    // Frequency response at f (Hz) for sample rate fs.
    std::complex<double> response(double f, double fs) const;
};

// Butterworth designs via bilinear transform. Low/high-pass require even order.
// Band-pass takes the low-pass prototype order; the digital filter has order
// 2*prototype_order.
BiquadCascade butter_lowpass(int order, double fc, double fs);
BiquadCascade butter_highpass(int order, double fc, double fs);
BiquadCascade butter_bandpass(int prototype_order, double f_lo, double f_hi, double fs);

}  // namespace psychoak
