#pragma once

#include <span>
#include <vector>

#include "psychoak/audio.hpp"

namespace psychoak {

// Modulation descriptors of one envelope: dominant modulation frequency
// (spectral peak, DC excluded) and depth (max - min of the smoothed
// envelope). A featureless envelope reports f_mod 0 and depth 0.
struct ModulationAnalysis {
    double f_mod_hz = 0.0;
    double delta_l = 0.0;
};

ModulationAnalysis analyze_modulation(std::span<const double> envelope, double rate_hz);

// Peak-picks the envelope spectrum within [f_lo, f_hi]; returns 0 when no
// peak rises meaningfully above the background.
double dominant_modulation_frequency(std::span<const double> envelope, double rate_hz,
                                     double f_lo, double f_hi);

// Per-Bark-band envelopes of a pressure signal: band-pass, rectify, low-pass,
// decimate, then compress toward a loudness-like scale.
struct BandEnvelopes {
    double rate_hz = 0.0;
    double dz_bark = 1.0;                    // integration step per band
    std::vector<double> center_bark;
    std::vector<std::vector<double>> bands;  // band-major
};

BandEnvelopes bark_band_envelopes(const CalibratedSignal& sig, int n_bands,
                                  double spacing_bark, double width_bark);

}  // namespace psychoak
