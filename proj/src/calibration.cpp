#include "psychoak/calibration.hpp"

#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "psychoak/loudness.hpp"
#include "psychoak/roughness.hpp"
#include "psychoak/sharpness.hpp"
#include "psychoak/synth.hpp"
#include "psychoak/third_octave.hpp"

namespace psychoak {

// Frozen values produced by tools/gen_calibration. Regenerate with
//   psychoak-gen-calibration
// after touching any metric engine and paste the printed table here.
static const CalibrationConstants kFrozen = {
    /* loudness_scale    */ 1.7072718646472476,
    /* sharpness_k       */ 0.11408252764409224,
    /* roughness_cal     */ 0.030845037699910864,
    /* fluctuation_scale */ 269.77771292014864,
};

const CalibrationConstants& calibration() { return kFrozen; }

namespace {

double steady_mean(std::span<const double> series, double rate_hz, double skip_s) {
    auto skip = static_cast<std::size_t>(skip_s * rate_hz);
    if (skip >= series.size()) skip = series.size() / 2;
    double acc = 0.0;
    for (std::size_t i = skip; i < series.size(); ++i) acc += series[i];
    return acc / static_cast<double>(series.size() - skip);
}

}  // namespace

CalibrationConstants compute_calibration_constants() {
    CalibrationConstants out = kFrozen;

    // (1) sone scale: 1 kHz tone at 40 dB SPL reads 1.000 sone
    {
        const auto tone = make_tone(1000.0, 40.0, 1.5);
        const ThirdOctaveBank bank(tone.sample_rate);
        const auto lp = decimate_series(specific_loudness(bank.smoothed_levels(tone)), 5);
        const auto n = loudness(lp);
        const double measured = steady_mean(n, lp.frame_rate_hz, 0.5);
        out.loudness_scale = kFrozen.loudness_scale / measured;
    }
    // (2) sharpness k: one-critical-band noise at 1 kHz, 60 dB reads 1.000 acum.
    //     The ratio S = k * integral / N is independent of the sone scale.
    {
        const auto noise = make_narrowband_noise(920.0, 1080.0, 60.0, 1.5);
        const ThirdOctaveBank bank(noise.sample_rate);
        const auto lp = decimate_series(specific_loudness(bank.smoothed_levels(noise)), 5);
        const auto s = sharpness(lp);
        const double measured = steady_mean(s, lp.frame_rate_hz, 0.5);
        out.sharpness_k = kFrozen.sharpness_k / measured;
    }
    // (3) roughness: 1 kHz, 60 dB, 100% AM at 70 Hz reads 1.000 asper
    {
        const auto am = make_am_tone(1000.0, 60.0, 70.0, 1.0, 1.5);
        const auto r = roughness(am);
        const double measured = steady_mean(r, kRoughnessBlockRate, 0.5);
        out.roughness_cal = kFrozen.roughness_cal / measured;
    }
    // (4) fluctuation strength: 1 kHz, 60 dB, 100% AM at 4 Hz reads 1.000 vacil
    {
        const auto am = make_am_tone(1000.0, 60.0, 4.0, 1.0, 4.0);
        const double measured = fluctuation_strength(am);
        out.fluctuation_scale = kFrozen.fluctuation_scale / measured;
    }
    return out;
}

}  // namespace psychoak
