#include "psychoak/roughness.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "psychoak/calibration.hpp"
#include "psychoak/errors.hpp"
#include "psychoak/filters.hpp"
#include "psychoak/modulation.hpp"

namespace psychoak {

namespace {

constexpr int kRoughnessBands = 24;        // 1 Bark apart, 1 Bark wide
constexpr int kFluctuationBands = 47;      // 0.5 Bark apart, 1 Bark wide
constexpr double kTransientTrimS = 0.2;

void append_cascade(BiquadCascade& dst, const BiquadCascade& src) {
    for (const auto& s : src.sections) dst.sections.push_back(s);
    dst.gain *= src.gain;
}

std::vector<std::vector<double>> filter_bands(const BandEnvelopes& envs,
                                              const BiquadCascade& chain_proto) {
    std::vector<std::vector<double>> out;
    out.reserve(envs.bands.size());
    for (const auto& band : envs.bands) {
        // steady-state start at the envelope's settled mean keeps the slow
        // DC-removal transient out of the depth measurement
        double mean = 0.0;
        if (!band.empty()) {
            const std::size_t skip = band.size() / 4;
            for (std::size_t i = skip; i < band.size(); ++i) mean += band[i];
            mean /= static_cast<double>(band.size() - skip);
        }
        BiquadCascade chain = chain_proto;
        chain.prime(mean);
        out.push_back(chain.run(band));
    }
    return out;
}

double band_depth(std::span<const double> x) {
    if (x.empty()) return 0.0;
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    return *mx - *mn;
}

}  // namespace

std::vector<double> roughness(const CalibratedSignal& sig) {
    if (sig.duration_s() < 0.5)
        throw SignalTooShort("roughness needs at least 0.5 s of signal");

    const auto envs = bark_band_envelopes(sig, kRoughnessBands, 1.0, 1.0);
    const double rate = envs.rate_hz;

    // modulation band 30-300 Hz plus the tracking roll-off at 70 Hz
    BiquadCascade chain = butter_highpass(2, 30.0, rate);
    append_cascade(chain, butter_lowpass(2, 300.0, rate));
    append_cascade(chain, butter_lowpass(2, 70.0, rate));

    const auto filtered = filter_bands(envs, chain);

    const auto n = filtered.front().size();
    const auto trim = std::min(static_cast<std::size_t>(rate * kTransientTrimS), n / 4);
    const std::size_t usable = n - trim;
    const auto block = static_cast<std::size_t>(rate * 0.5);
    const auto hop = static_cast<std::size_t>(rate / kRoughnessBlockRate);

    std::vector<double> series;
    const double cal = calibration().roughness_cal;
    for (std::size_t start = trim; start + 1 < n; start += hop) {
        const std::size_t len = std::min(block, n - start);
        if (len < block / 2 && !series.empty()) break;

        std::vector<double> summed(len, 0.0);
        double depth_integral = 0.0;
        for (const auto& band : filtered) {
            const std::span<const double> seg(band.data() + start, len);
            depth_integral += band_depth(seg) * envs.dz_bark;
            for (std::size_t i = 0; i < len; ++i) summed[i] += seg[i];
        }
        const double f_mod = dominant_modulation_frequency(summed, rate, 20.0, 400.0);
        series.push_back(f_mod > 0.0 ? cal * f_mod * depth_integral : 0.0);
        if (usable <= block) break;  // single block for short segments
    }
    if (series.empty()) series.push_back(0.0);
    return series;
}

double fluctuation_strength(const CalibratedSignal& sig) {
    if (sig.duration_s() < 2.0)
        throw SignalTooShort("fluctuation strength needs at least 2 s of signal");

    const auto envs = bark_band_envelopes(sig, kFluctuationBands, 0.5, 1.0);
    const double rate = envs.rate_hz;

    BiquadCascade chain = butter_highpass(2, 0.2, rate);
    append_cascade(chain, butter_lowpass(2, 30.0, rate));

    const auto filtered = filter_bands(envs, chain);

    const auto n = filtered.front().size();
    const auto trim = std::min(static_cast<std::size_t>(rate * 0.3), n / 4);
    const std::size_t len = n - trim;

    std::vector<double> summed(len, 0.0);
    double depth_integral = 0.0;
    for (const auto& band : filtered) {
        const std::span<const double> seg(band.data() + trim, len);
        depth_integral += band_depth(seg) * envs.dz_bark;
        for (std::size_t i = 0; i < len; ++i) summed[i] += seg[i];
    }
    const double f_mod = dominant_modulation_frequency(summed, rate, 0.2, 32.0);
    if (f_mod <= 0.0) return 0.0;
    return calibration().fluctuation_scale * 0.008 * depth_integral /
           (f_mod / 4.0 + 4.0 / f_mod);
}

}  // namespace psychoak
