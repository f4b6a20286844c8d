#pragma once

#include "psychoak/audio.hpp"

namespace psychoak {

// Deterministic test and calibration signals. Levels are dB SPL re 20 uPa of
// the (unmodulated) carrier.

CalibratedSignal make_tone(double f_hz, double level_db, double duration_s,
                           double fs = kStandardRate);

// p(t) = A (1 + depth cos(2 pi fm t)) cos(2 pi fc t)
CalibratedSignal make_am_tone(double fc_hz, double level_db, double fm_hz, double depth,
                              double duration_s, double fs = kStandardRate);

// Sum of equally spaced sinusoids with deterministic phases; total RMS level
// equals level_db.
CalibratedSignal make_narrowband_noise(double f_lo, double f_hi, double level_db,
                                       double duration_s, double fs = kStandardRate,
                                       int n_components = 40);

CalibratedSignal make_silence(double duration_s, double fs = kStandardRate);

}  // namespace psychoak
