// Regenerates the SQM calibration constants from the reference signals and
// prints the table to paste into src/calibration.cpp.
#include <cstdio>

#include "psychoak/calibration.hpp"

int main() {
    const auto c = psychoak::compute_calibration_constants();
    std::printf("static const CalibrationConstants kFrozen = {\n");
    std::printf("    /* loudness_scale    */ %.17g,\n", c.loudness_scale);
    std::printf("    /* sharpness_k       */ %.17g,\n", c.sharpness_k);
    std::printf("    /* roughness_cal     */ %.17g,\n", c.roughness_cal);
    std::printf("    /* fluctuation_scale */ %.17g,\n", c.fluctuation_scale);
    std::printf("};\n");
    return 0;
}
