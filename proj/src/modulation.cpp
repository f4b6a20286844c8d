#include "psychoak/modulation.hpp"

#include <algorithm>
#include <cmath>

#include "psychoak/bark.hpp"
#include "psychoak/errors.hpp"
#include "psychoak/fft.hpp"
#include "psychoak/filters.hpp"

namespace psychoak {

namespace {

constexpr int kEnvelopeDecimation = 10;
constexpr double kEnvelopeLowpassHz = 500.0;
constexpr double kLoudnessCompression = 0.46;  // sone ~ p^0.46 at moderate levels

}  // namespace

double dominant_modulation_frequency(std::span<const double> envelope, double rate_hz,
                                     double f_lo, double f_hi) {
    if (envelope.size() < 8) return 0.0;
    const std::size_t nfft = next_pow2(envelope.size()) * 2;
    // remove the mean so DC leakage does not mask low-frequency peaks
    double mean = 0.0;
    for (double v : envelope) mean += v;
    mean /= static_cast<double>(envelope.size());
    std::vector<double> centred(envelope.size());
    for (std::size_t i = 0; i < envelope.size(); ++i) centred[i] = envelope[i] - mean;

    const auto spec = rfft(centred, nfft);
    const double df = rate_hz / static_cast<double>(nfft);

    std::size_t best = 0;
    double best_mag = 0.0;
    for (std::size_t k = 1; k < spec.size(); ++k) {
        const double f = static_cast<double>(k) * df;
        if (f < f_lo || f > f_hi) continue;
        const double m = std::abs(spec[k]);
        if (m > best_mag) {
            best_mag = m;
            best = k;
        }
    }
    if (best == 0) return 0.0;
    const double floor_mag =
        1e-6 * std::abs(mean) * static_cast<double>(envelope.size()) + 1e-12;
    if (best_mag < floor_mag) return 0.0;

    // parabolic interpolation around the winning bin
    double delta = 0.0;
    if (best > 0 && best + 1 < spec.size()) {
        const double m0 = std::abs(spec[best - 1]);
        const double m1 = best_mag;
        const double m2 = std::abs(spec[best + 1]);
        const double denom = m0 - 2.0 * m1 + m2;
        if (std::abs(denom) > 1e-12) delta = std::clamp(0.5 * (m0 - m2) / denom, -0.5, 0.5);
    }
    return (static_cast<double>(best) + delta) * df;
}

ModulationAnalysis analyze_modulation(std::span<const double> envelope, double rate_hz) {
    if (static_cast<double>(envelope.size()) / rate_hz < 0.5)
        throw SignalTooShort("modulation analysis needs at least 0.5 s of envelope");

    // light smoothing (~1 ms moving average)
    const std::size_t w =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(rate_hz * 0.001)));
    std::vector<double> smooth(envelope.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < envelope.size(); ++i) {
        acc += envelope[i];
        if (i >= w) acc -= envelope[i - w];
        smooth[i] = acc / static_cast<double>(std::min(i + 1, w));
    }

    ModulationAnalysis out;
    const auto [mn, mx] = std::minmax_element(smooth.begin(), smooth.end());
    out.delta_l = *mx - *mn;
    out.f_mod_hz = dominant_modulation_frequency(smooth, rate_hz, 2.0 * rate_hz /
                                                     static_cast<double>(
                                                         next_pow2(envelope.size()) * 2),
                                                 rate_hz / 2.0);
    return out;
}

BandEnvelopes bark_band_envelopes(const CalibratedSignal& sig, int n_bands,
                                  double spacing_bark, double width_bark) {
    const double fs = sig.sample_rate;
    BandEnvelopes out;
    out.dz_bark = spacing_bark;
    out.rate_hz = fs / kEnvelopeDecimation;

    auto env_lp = butter_lowpass(4, kEnvelopeLowpassHz, fs);
    const std::size_t n_env = sig.samples.size() / kEnvelopeDecimation;

    for (int b = 0; b < n_bands; ++b) {
        const double zc = 0.5 * width_bark + spacing_bark * b;
        out.center_bark.push_back(zc);
        double f_lo = std::max(20.0, bark_to_hz(zc - width_bark / 2.0));
        double f_hi = std::min(0.47 * fs, bark_to_hz(zc + width_bark / 2.0));
        std::vector<double> env(n_env, 0.0);
        if (f_hi > f_lo * 1.02) {
            auto bp = butter_bandpass(2, f_lo, f_hi, fs);
            auto lp = env_lp;
            lp.reset();
            std::size_t j = 0;
            for (std::size_t i = 0; i < sig.samples.size(); ++i) {
                const double e = lp.process(std::abs(bp.process(sig.samples[i])));
                if ((i + 1) % kEnvelopeDecimation == 0 && j < n_env)
                    env[j++] = std::pow(std::max(e, 0.0), kLoudnessCompression);
            }
        }
        out.bands.push_back(std::move(env));
    }
    return out;
}

}  // namespace psychoak
