#pragma once

#include <vector>

#include "psychoak/audio.hpp"

namespace psychoak {

// Roughness time series, asper, one value per 0.25 s block. Modulation in the
// 30-300 Hz range; an envelope-tracking roll-off above 70 Hz shapes the
// response so it peaks at the 70 Hz reference condition.
std::vector<double> roughness(const CalibratedSignal& sig);
inline constexpr double kRoughnessBlockRate = 4.0;  // blocks per second

// Fluctuation strength, vacil, one scalar for the segment. Modulation in the
// 0-30 Hz range, with the 4 Hz emphasis carried by the f/4 + 4/f denominator.
double fluctuation_strength(const CalibratedSignal& sig);

}  // namespace psychoak
