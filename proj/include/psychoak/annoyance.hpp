#pragma once

#include <span>

#include "psychoak/sqm.hpp"

namespace psychoak {

struct PaInput {
    double n5 = 0.0;  // sone
    double s = 0.0;   // acum
    double r = 0.0;   // asper
    double f = 0.0;   // vacil
};

struct PaResult {
    double pa = 0.0;
    double w_s = 0.0;
    double w_fr = 0.0;
};

// Loudness value exceeded during 5% of the exposure time.
double n5(std::span<const double> loudness_series);

// Psychoacoustic annoyance: PA = N5 (1 + sqrt(wS^2 + wFR^2)), with
// wS = (S - 1.75) * 0.25 log10(N5 + 10) for S > 1.75 (else 0) and
// wFR = 2.18 / N5^0.4 * (0.4 F + 0.6 R). Silence (N5 = 0) maps to PA = 0.
PaResult pa(const PaInput& input);

PaResult pa_from_segment(const SqmResult& sqm);

}  // namespace psychoak
