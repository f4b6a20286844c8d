#include "psychoak/bark.hpp"

#include <cmath>

namespace psychoak {

double hz_to_bark(double f_hz) {
    return 13.0 * std::atan(0.00076 * f_hz) +
           3.5 * std::atan((f_hz / 7500.0) * (f_hz / 7500.0));
}

double bark_to_hz(double z) {
    double lo = 0.0, hi = 30000.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (hz_to_bark(mid) < z)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace psychoak
