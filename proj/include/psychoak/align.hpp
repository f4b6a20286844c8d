#pragma once

#include "psychoak/audio.hpp"
#include "psychoak/flightlog.hpp"

namespace psychoak {

// Offset between flight log and audio: positive when the audio events lag the
// log events. Resolution is one STFT hop. `ambiguous` is set when the best
// normalized correlation stays below 0.2.
struct AlignmentResult {
    double offset_s = 0.0;
    double peak_correlation = 0.0;
    bool ambiguous = false;
};

// Correlates the summed-RPM envelope against the acoustic energy envelope in
// the blade-passing band (median RPM x blade count, +-20%).
AlignmentResult align_log(const CalibratedSignal& sig, const FlightLog& log,
                          int blade_count_per_rotor = 2);

}  // namespace psychoak
