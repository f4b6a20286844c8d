#include "psychoak/third_octave.hpp"

#include <cmath>

#include "psychoak/errors.hpp"

namespace psychoak {

std::array<double, kThirdOctaveBands> third_octave_centers() {
    std::array<double, kThirdOctaveBands> c{};
    for (int k = 0; k < kThirdOctaveBands; ++k)
        c[static_cast<std::size_t>(k)] = 1000.0 * std::pow(10.0, (k - 16) / 10.0);
    return c;
}

namespace {

double level_db(double p_rms) {
    const double p = std::max(p_rms, 1e-12);
    return std::max(20.0 * std::log10(p / kRefPressure), kLevelFloorDb);
}

}  // namespace

ThirdOctaveBank::ThirdOctaveBank(double sample_rate) : fs_(sample_rate) {
    const auto centers = third_octave_centers();
    const double edge = std::pow(10.0, 1.0 / 20.0);  // half-band ratio
    const double f_max = 0.49 * fs_;
    for (int b = 0; b < kThirdOctaveBands; ++b) {
        const double fc = centers[static_cast<std::size_t>(b)];
        double f_lo = fc / edge;
        double f_hi = fc * edge;
        if (f_lo >= f_max * 0.98) {
            active_[static_cast<std::size_t>(b)] = false;
            continue;
        }
        f_hi = std::min(f_hi, f_max);
        // prototype order 4 keeps the skirts close to the IEC class-1 limits
        filters_[static_cast<std::size_t>(b)] = butter_bandpass(4, f_lo, f_hi, fs_);
        active_[static_cast<std::size_t>(b)] = true;
    }
}

ThirdOctaveLevels ThirdOctaveBank::analyze(const CalibratedSignal& sig,
                                           double frame_s) const {
    if (sig.duration_s() < frame_s)
        throw SignalTooShort("signal shorter than one analysis frame");
    const auto frame_len = static_cast<std::size_t>(std::llround(frame_s * fs_));
    const std::size_t n_frames = sig.samples.size() / frame_len;

    ThirdOctaveLevels out;
    out.frame_rate_hz = 1.0 / frame_s;
    out.frames.assign(n_frames, {});
    for (auto& f : out.frames) f.fill(kLevelFloorDb);

    std::vector<double> band(sig.samples.size());
    for (int b = 0; b < kThirdOctaveBands; ++b) {
        if (!active_[static_cast<std::size_t>(b)]) continue;
        BiquadCascade filt = filters_[static_cast<std::size_t>(b)];
        filt.process(sig.samples, band);
        for (std::size_t f = 0; f < n_frames; ++f) {
            double acc = 0.0;
            for (std::size_t i = f * frame_len; i < (f + 1) * frame_len; ++i)
                acc += band[i] * band[i];
            out.frames[f][static_cast<std::size_t>(b)] =
                level_db(std::sqrt(acc / static_cast<double>(frame_len)));
        }
    }
    return out;
}

ThirdOctaveLevels ThirdOctaveBank::smoothed_levels(const CalibratedSignal& sig,
                                                   double grid_rate_hz) const {
    if (sig.samples.empty()) throw SignalTooShort("empty signal");
    const auto centers = third_octave_centers();
    const std::size_t stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fs_ / grid_rate_hz)));
    const std::size_t n_frames = sig.samples.size() / stride;

    ThirdOctaveLevels out;
    out.frame_rate_hz = fs_ / static_cast<double>(stride);
    out.frames.assign(n_frames, {});
    for (auto& f : out.frames) f.fill(kLevelFloorDb);

    std::vector<double> band(sig.samples.size());
    for (int b = 0; b < kThirdOctaveBands; ++b) {
        if (!active_[static_cast<std::size_t>(b)]) continue;
        BiquadCascade filt = filters_[static_cast<std::size_t>(b)];
        filt.process(sig.samples, band);

        const double fc = centers[static_cast<std::size_t>(b)];
        const double bandwidth = fc * (std::pow(10.0, 0.05) - std::pow(10.0, -0.05));
        const double tau = std::max(0.002, 1.0 / bandwidth);
        const double alpha = 1.0 - std::exp(-1.0 / (tau * fs_));

        double power = 0.0;
        std::size_t f = 0;
        for (std::size_t i = 0; i < sig.samples.size(); ++i) {
            power += alpha * (band[i] * band[i] - power);
            if ((i + 1) % stride == 0 && f < n_frames) {
                out.frames[f][static_cast<std::size_t>(b)] =
                    level_db(std::sqrt(std::max(power, 0.0)));
                ++f;
            }
        }
    }
    return out;
}

}  // namespace psychoak
