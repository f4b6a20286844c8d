#pragma once

#include <array>
#include <vector>

#include "psychoak/audio.hpp"
#include "psychoak/filters.hpp"

namespace psychoak {

inline constexpr int kThirdOctaveBands = 28;  // 25 Hz .. 12.5 kHz

// Exact base-ten centers: 1000 * 10^((k-16)/10), k = 0..27.
std::array<double, kThirdOctaveBands> third_octave_centers();

// Per-frame band sound pressure levels, dB re 20 uPa.
struct ThirdOctaveLevels {
    double frame_rate_hz = 0.0;
    std::vector<std::array<double, kThirdOctaveBands>> frames;

    std::size_t size() const { return frames.size(); }
};

// 8th-order Butterworth band-pass per band (IEC class-compliant skirts).
// Bands whose pass band falls above Nyquist stay silent (level floor).
class ThirdOctaveBank {
public:
    explicit ThirdOctaveBank(double sample_rate);

    // Block analysis: RMS band level per frame of frame_s seconds.
    ThirdOctaveLevels analyze(const CalibratedSignal& sig, double frame_s = 0.1) const;

    // Continuously smoothed band levels sampled on a uniform grid; feeds the
    // loudness engine. Smoothing time constant per band tracks the band
    // bandwidth with a 2 ms floor.
    ThirdOctaveLevels smoothed_levels(const CalibratedSignal& sig,
                                      double grid_rate_hz = 500.0) const;

    bool band_active(int band) const { return active_[static_cast<std::size_t>(band)]; }

private:
    double fs_;
    std::array<BiquadCascade, kThirdOctaveBands> filters_;
    std::array<bool, kThirdOctaveBands> active_{};
};

inline constexpr double kLevelFloorDb = -70.0;

}  // namespace psychoak
