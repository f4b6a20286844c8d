#pragma once

namespace psychoak {

// Unit normalizations of the metric engines. Each constant pins a reference
// condition to its unit value:
//   loudness_scale    -> 1 kHz tone at 40 dB SPL reads 1 sone
//   sharpness_k       -> critical-band noise at 1 kHz, 60 dB reads 1 acum
//   roughness_cal     -> 1 kHz, 60 dB, 100% AM at 70 Hz reads 1 asper
//   fluctuation_scale -> 1 kHz, 60 dB, 100% AM at 4 Hz reads 1 vacil
struct CalibrationConstants {
    double loudness_scale = 1.0;
    double sharpness_k = 1.0;
    double roughness_cal = 1.0;
    double fluctuation_scale = 1.0;
};

// Frozen constants compiled into the library.
const CalibrationConstants& calibration();

// Regenerates the constants by synthesizing the reference signals and running
// them through the metric paths. Returns values that reproduce the frozen
// table when the engines are unchanged.
CalibrationConstants compute_calibration_constants();

}  // namespace psychoak
