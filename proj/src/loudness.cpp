#include "psychoak/loudness.hpp"

#include <cmath>

#include "psychoak/calibration.hpp"

namespace psychoak {

namespace {

// Table data of the DIN 45631 / ISO 532 B loudness procedure.

// Level ranges for the low-frequency equal-loudness corrections.
constexpr double kRap[8] = {45, 55, 65, 71, 80, 90, 100, 120};

// Corrections of the lowest eleven third-octave bands per level range.
constexpr double kDll[8][11] = {
    {-32, -24, -16, -10, -5, 0, -7, -3, 0, -2, 0},
    {-29, -22, -15, -10, -4, 0, -7, -2, 0, -2, 0},
    {-27, -19, -14, -9, -4, 0, -6, -2, 0, -2, 0},
    {-25, -17, -12, -9, -3, 0, -5, -2, 0, -2, 0},
    {-23, -16, -11, -7, -3, 0, -4, -1, 0, -1, 0},
    {-20, -14, -10, -6, -3, 0, -4, -1, 0, -1, 0},
    {-18, -12, -9, -6, -2, 0, -3, -1, 0, -1, 0},
    {-15, -10, -8, -4, -2, 0, -3, -1, 0, -1, 0}};

// Critical-band level at the threshold in quiet.
constexpr double kLtq[20] = {30, 18, 12, 8, 7, 6, 5, 4, 3, 3,
                             3,  3,  3,  3, 3, 3, 3, 3, 3, 3};

// Ear transmission correction.
constexpr double kA0[20] = {0,    0,    0,    0,    0,  0,   0, 0, 0, 0,
                            -0.5, -1.6, -3.2, -5.4, -5.6, -4, -1.5, 2, 5, 12};

// Free/diffuse field difference.
constexpr double kDdf[20] = {0,  0,    0.5, 0.9,  1.2, 1.6, 2.3, 2.8, 3,   2,
                             0, -1.4, -2,  -1.9, -1,  0.5, 3,   4,   4.3, 4};

// Third-octave to critical-band level adaptation.
constexpr double kDcb[20] = {-0.25, -0.6, -0.8, -0.8, -0.5, 0,   0.5, 1.1, 1.5, 1.7,
                             1.8,   1.8,  1.7,  1.6,  1.4,  1.2, 0.8, 0.5, 0,   -0.5};

// Upper limits of the approximated critical bands, Bark.
constexpr double kZup[21] = {0.9,  1.8,  2.8,  3.5,  4.4,  5.4,  6.6,
                             7.9,  9.2,  10.6, 12.3, 13.8, 15.2, 16.7,
                             18.1, 19.3, 20.6, 21.8, 22.7, 23.6, 24.0};

// Specific-loudness ranges selecting the upper-slope steepness.
constexpr double kRns[18] = {21.5, 18,   15.1, 11.5, 9,    6.1,  4.4,   3.1, 2.13,
                             1.36, 0.82, 0.42, 0.30, 0.22, 0.15, 0.10, 0.035, 0};

// Upper-slope steepness per range and critical band, sone/Bark per Bark.
constexpr double kUsl[18][8] = {
    {13.00, 8.20, 6.30, 5.50, 5.50, 5.50, 5.50, 5.50},
    {9.00, 7.50, 6.00, 5.10, 4.50, 4.50, 4.50, 4.50},
    {7.80, 6.70, 5.60, 4.90, 4.40, 3.90, 3.90, 3.90},
    {6.20, 5.80, 4.90, 4.30, 3.80, 3.40, 3.40, 3.40},
    {4.50, 5.00, 4.70, 3.90, 3.40, 3.00, 3.00, 3.00},
    {3.70, 4.00, 4.40, 3.50, 3.00, 2.70, 2.70, 2.70},
    {2.90, 3.20, 3.90, 3.20, 2.70, 2.40, 2.40, 2.40},
    {2.40, 2.70, 3.40, 2.90, 2.40, 2.20, 2.20, 2.20},
    {1.95, 2.20, 2.90, 2.50, 2.10, 1.90, 1.90, 1.90},
    {1.50, 1.70, 2.40, 2.20, 1.90, 1.70, 1.70, 1.70},
    {0.72, 1.10, 1.55, 1.60, 1.50, 1.40, 1.40, 1.40},
    {0.59, 0.85, 1.20, 1.30, 1.25, 1.20, 1.20, 1.20},
    {0.40, 0.60, 0.80, 0.90, 0.95, 0.95, 0.95, 0.95},
    {0.27, 0.38, 0.55, 0.65, 0.70, 0.70, 0.70, 0.70},
    {0.16, 0.27, 0.38, 0.45, 0.50, 0.50, 0.50, 0.50},
    {0.12, 0.22, 0.31, 0.36, 0.40, 0.40, 0.40, 0.40},
    {0.09, 0.16, 0.24, 0.27, 0.30, 0.30, 0.30, 0.30},
    {0.06, 0.12, 0.18, 0.22, 0.25, 0.25, 0.25, 0.25}};

// Decay time constant of the temporal post-processing.
constexpr double kDecayTau = 0.05;  // s

// Core loudness per 20 critical bands from 28 third-octave levels.
void core_loudness(const std::array<double, kThirdOctaveBands>& lt, bool diffuse,
                   double nm[21]) {
    double ti[11];
    for (int i = 0; i < 11; ++i) {
        int j = 0;
        while (j < 7 && lt[static_cast<std::size_t>(i)] > kRap[j] - kDll[j][i]) ++j;
        ti[i] = std::pow(10.0, 0.1 * (lt[static_cast<std::size_t>(i)] + kDll[j][i]));
    }
    const double gi[3] = {ti[0] + ti[1] + ti[2] + ti[3] + ti[4] + ti[5],
                          ti[6] + ti[7] + ti[8], ti[9] + ti[10]};
    double lcb[3];
    for (int k = 0; k < 3; ++k)
        lcb[k] = gi[k] > 0.0 ? 10.0 * std::log10(gi[k]) : -70.0;

    constexpr double s = 0.25;
    for (int i = 0; i < 20; ++i) {
        double le = i < 3 ? lcb[i] : lt[static_cast<std::size_t>(i + 8)];
        le -= kA0[i];
        nm[i] = 0.0;
        if (diffuse) le += kDdf[i];
        if (le > kLtq[i]) {
            le -= kDcb[i];
            const double mp1 = 0.0635 * std::pow(10.0, 0.025 * kLtq[i]);
            const double mp2 =
                std::pow(1.0 - s + s * std::pow(10.0, 0.1 * (le - kLtq[i])), 0.25) - 1.0;
            nm[i] = std::max(mp1 * mp2, 0.0);
        }
    }
    // correction within the first critical band
    double korry = 0.4 + 0.32 * std::pow(nm[0], 0.2);
    if (korry > 1.0) korry = 1.0;
    nm[0] *= korry;
    nm[20] = 0.0;
}

// Builds the specific-loudness pattern over the 0.1-Bark grid by walking the
// critical-band segments and attaching the level-dependent upper slopes.
void build_pattern(const double nm[21], std::array<double, kBarkBins>& ns) {
    ns.fill(0.0);
    double z1 = 0.0, n1 = 0.0;
    double z = 0.1;
    int iz = 0;
    int j = 0;
    for (int i = 0; i < 21; ++i) {
        const double zup = kZup[i] + 0.0001;
        const int ig = std::min(std::max(i - 1, 0), 7);
        while (z1 < zup) {
            double z2, n2;
            if (n1 <= nm[i]) {
                if (n1 < nm[i]) {
                    j = 0;
                    while (j < 17 && kRns[j] > nm[i]) ++j;
                }
                z2 = zup;
                n2 = nm[i];
                while (z < z2 + 1e-9 && iz < kBarkBins) {
                    ns[static_cast<std::size_t>(iz++)] = n2;
                    z += 0.1;
                }
            } else {
                n2 = kRns[j];
                if (n2 < nm[i]) n2 = nm[i];
                double dz = (n1 - n2) / kUsl[j][ig];
                z2 = z1 + dz;
                if (z2 > zup) {
                    z2 = zup;
                    dz = z2 - z1;
                    n2 = n1 - dz * kUsl[j][ig];
                }
                while (z < z2 + 1e-9 && iz < kBarkBins) {
                    ns[static_cast<std::size_t>(iz++)] =
                        std::max(n1 - (z - z1) * kUsl[j][ig], 0.0);
                    z += 0.1;
                }
                if (n2 <= kRns[j] && j < 17) ++j;
            }
            n1 = n2;
            z1 = z2;
        }
    }
    while (iz < kBarkBins) ns[static_cast<std::size_t>(iz++)] = 0.0;
}

}  // namespace

std::array<double, kBarkBins> specific_loudness_pattern(
    const std::array<double, kThirdOctaveBands>& band_levels_db, bool diffuse_field) {
    double nm[21];
    core_loudness(band_levels_db, diffuse_field, nm);
    std::array<double, kBarkBins> ns{};
    build_pattern(nm, ns);
    const double scale = calibration().loudness_scale;
    for (auto& v : ns) v *= scale;
    return ns;
}

SpecificLoudnessSeries specific_loudness(const ThirdOctaveLevels& levels,
                                         bool diffuse_field) {
    SpecificLoudnessSeries out;
    out.frame_rate_hz = levels.frame_rate_hz;
    out.frames.reserve(levels.size());

    std::array<double, kBarkBins> state{};
    const double dt = levels.frame_rate_hz > 0.0 ? 1.0 / levels.frame_rate_hz : 0.0;
    const double release = dt > 0.0 ? std::exp(-dt / kDecayTau) : 0.0;

    for (const auto& frame : levels.frames) {
        auto ns = specific_loudness_pattern(frame, diffuse_field);
        for (int k = 0; k < kBarkBins; ++k) {
            auto& st = state[static_cast<std::size_t>(k)];
            const double in = ns[static_cast<std::size_t>(k)];
            st = in >= st ? in : in + (st - in) * release;
            ns[static_cast<std::size_t>(k)] = st;
        }
        out.frames.push_back(ns);
    }
    return out;
}

std::vector<double> loudness(const SpecificLoudnessSeries& lp) {
    std::vector<double> n(lp.size());
    for (std::size_t f = 0; f < lp.size(); ++f) {
        double acc = 0.0;
        for (double v : lp.frames[f]) acc += v;
        n[f] = acc * 0.1;
    }
    return n;
}

SpecificLoudnessSeries decimate_series(const SpecificLoudnessSeries& lp,
                                       std::size_t factor) {
    if (factor <= 1) return lp;
    SpecificLoudnessSeries out;
    out.frame_rate_hz = lp.frame_rate_hz / static_cast<double>(factor);
    for (std::size_t f = 0; f < lp.size(); f += factor) out.frames.push_back(lp.frames[f]);
    return out;
}

}  // namespace psychoak
