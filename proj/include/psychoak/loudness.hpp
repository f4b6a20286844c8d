#pragma once

#include <array>
#include <vector>

#include "psychoak/third_octave.hpp"

namespace psychoak {

inline constexpr int kBarkBins = 240;  // 0.1-Bark steps over z in (0, 24]

// Time-indexed specific loudness L'(z), sone/Bark.
struct SpecificLoudnessSeries {
    double frame_rate_hz = 0.0;
    std::vector<std::array<double, kBarkBins>> frames;

    std::size_t size() const { return frames.size(); }
};

// Stationary specific-loudness pattern for one frame of 28 third-octave band
// levels: low-band grouping into critical-band levels, core loudness power
// law, upper masking slopes, sampled at 0.1 Bark. Output is scaled by the
// sone normalization constant (1 kHz tone at 40 dB SPL -> 1 sone).
std::array<double, kBarkBins> specific_loudness_pattern(
    const std::array<double, kThirdOctaveBands>& band_levels_db, bool diffuse_field = false);

// Frame-wise pattern computation plus nonlinear temporal decay: attack is
// instantaneous, decay follows an exponential release per Bark bin.
SpecificLoudnessSeries specific_loudness(const ThirdOctaveLevels& levels,
                                         bool diffuse_field = false);

// Rectangular integral over z (dz = 0.1 Bark), one sone value per frame.
std::vector<double> loudness(const SpecificLoudnessSeries& lp);

// Keep every decimate-th frame; used to bring the 500/s decay grid down to
// the 100/s output rate.
SpecificLoudnessSeries decimate_series(const SpecificLoudnessSeries& lp, std::size_t factor);

}  // namespace psychoak
