#pragma once

#include <span>
#include <vector>

#include "psychoak/audio.hpp"

namespace psychoak {

struct Summary {
    double mean = 0.0;
    double max = 0.0;
    double p05_exceeded = 0.0;  // value exceeded during 5% of frames
};

Summary summarize(std::span<const double> series);

// Nearest-rank percentile of the value exceeded during `fraction` of frames.
double exceedance_level(std::span<const double> series, double fraction = 0.05);

// The four sound quality metrics of one maneuver segment.
struct SqmResult {
    std::vector<double> loudness_t;   // sone, 100 frames/s
    std::vector<double> sharpness_t;  // acum, 100 frames/s
    std::vector<double> roughness_t;  // asper, 4 blocks/s
    double fluctuation = 0.0;         // vacil, per segment

    double loudness_rate_hz = 100.0;
    double sharpness_rate_hz = 100.0;
    double roughness_rate_hz = 4.0;

    Summary loudness_summary;
    Summary sharpness_summary;
    Summary roughness_summary;
    Summary fluctuation_summary;
};

// Full metric computation: smoothed third-octave levels on a 500/s grid,
// specific loudness with temporal decay decimated to 100/s, sharpness on the
// same grid, roughness blocks, fluctuation strength.
SqmResult compute_sqm(const CalibratedSignal& segment);

}  // namespace psychoak
