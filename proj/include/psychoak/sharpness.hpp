#pragma once

#include <vector>

#include "psychoak/loudness.hpp"

namespace psychoak {

// Weighting g(z): unity up to 15.8 Bark, rising exponentially above.
double sharpness_weighting(double z_bark);

// Weighted-centroid sharpness per frame, acum. Frames whose total loudness is
// below a small floor return 0.
std::vector<double> sharpness(const SpecificLoudnessSeries& lp);

inline constexpr double kSharpnessLoudnessFloor = 1e-6;  // sone

}  // namespace psychoak
