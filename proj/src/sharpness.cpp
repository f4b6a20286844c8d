#include "psychoak/sharpness.hpp"

#include <cmath>

#include "psychoak/calibration.hpp"

namespace psychoak {

double sharpness_weighting(double z_bark) {
    if (z_bark <= 15.8) return 1.0;
    return 0.15 * std::exp(0.42 * (z_bark - 15.8)) + 0.85;
}

std::vector<double> sharpness(const SpecificLoudnessSeries& lp) {
    const double k = calibration().sharpness_k;
    std::vector<double> out(lp.size(), 0.0);
    for (std::size_t f = 0; f < lp.size(); ++f) {
        double total = 0.0, weighted = 0.0;
        for (int i = 0; i < kBarkBins; ++i) {
            const double z = 0.1 * (i + 1);
            const double v = lp.frames[f][static_cast<std::size_t>(i)];
            total += v * 0.1;
            weighted += v * sharpness_weighting(z) * z * 0.1;
        }
        if (total > kSharpnessLoudnessFloor) out[f] = k * weighted / total;
    }
    return out;
}

}  // namespace psychoak
