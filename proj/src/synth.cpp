#include "psychoak/synth.hpp"

#include <cmath>
#include <numbers>

namespace psychoak {

namespace {

double spl_to_amplitude(double level_db) {
    return std::numbers::sqrt2 * kRefPressure * std::pow(10.0, level_db / 20.0);
}

CalibratedSignal blank(double duration_s, double fs) {
    CalibratedSignal s;
    s.sample_rate = fs;
    s.samples.assign(static_cast<std::size_t>(std::llround(duration_s * fs)), 0.0);
    return s;
}

}  // namespace

CalibratedSignal make_tone(double f_hz, double level_db, double duration_s, double fs) {
    CalibratedSignal s = blank(duration_s, fs);
    const double a = spl_to_amplitude(level_db);
    const double w = 2.0 * std::numbers::pi * f_hz / fs;
    for (std::size_t i = 0; i < s.samples.size(); ++i)
        s.samples[i] = a * std::sin(w * static_cast<double>(i));
    return s;
}

CalibratedSignal make_am_tone(double fc_hz, double level_db, double fm_hz, double depth,
                              double duration_s, double fs) {
    CalibratedSignal s = blank(duration_s, fs);
    const double a = spl_to_amplitude(level_db);
    const double wc = 2.0 * std::numbers::pi * fc_hz / fs;
    const double wm = 2.0 * std::numbers::pi * fm_hz / fs;
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        const auto n = static_cast<double>(i);
        s.samples[i] = a * (1.0 + depth * std::cos(wm * n)) * std::sin(wc * n);
    }
    return s;
}

CalibratedSignal make_narrowband_noise(double f_lo, double f_hi, double level_db,
                                       double duration_s, double fs, int n_components) {
    CalibratedSignal s = blank(duration_s, fs);
    const double target_rms = kRefPressure * std::pow(10.0, level_db / 20.0);
    // each component has RMS a/sqrt(2); n incoherent components sum in power
    const double a = target_rms * std::numbers::sqrt2 / std::sqrt(double(n_components));
    constexpr double golden = 0.6180339887498949;
    for (int k = 0; k < n_components; ++k) {
        const double f = f_lo + (f_hi - f_lo) * (k + 0.5) / n_components;
        const double w = 2.0 * std::numbers::pi * f / fs;
        const double phase = 2.0 * std::numbers::pi * std::fmod(golden * (k + 1), 1.0);
        for (std::size_t i = 0; i < s.samples.size(); ++i)
            s.samples[i] += a * std::sin(w * static_cast<double>(i) + phase);
    }
    return s;
}

CalibratedSignal make_silence(double duration_s, double fs) {
    return blank(duration_s, fs);
}

}  // namespace psychoak
