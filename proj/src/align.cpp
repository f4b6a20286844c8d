#include "psychoak/align.hpp"

#include <algorithm>
#include <cmath>

#include "psychoak/errors.hpp"
#include "psychoak/stft.hpp"

namespace psychoak {

namespace {

// Pearson correlation of a[i] against b[i - lag] over the overlap.
double lag_correlation(const std::vector<double>& a, const std::vector<double>& b,
                       long lag, std::size_t min_overlap) {
    const long n_a = static_cast<long>(a.size());
    const long n_b = static_cast<long>(b.size());
    const long lo = std::max(0L, lag);
    const long hi = std::min(n_a, n_b + lag);
    if (hi - lo < static_cast<long>(min_overlap)) return 0.0;

    const auto n = static_cast<double>(hi - lo);
    double ma = 0.0, mb = 0.0;
    for (long i = lo; i < hi; ++i) {
        ma += a[static_cast<std::size_t>(i)];
        mb += b[static_cast<std::size_t>(i - lag)];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (long i = lo; i < hi; ++i) {
        const double da = a[static_cast<std::size_t>(i)] - ma;
        const double db = b[static_cast<std::size_t>(i - lag)] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa < 1e-24 || sbb < 1e-24) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

AlignmentResult align_log(const CalibratedSignal& sig, const FlightLog& log,
                          int blade_count_per_rotor) {
    log.validate();
    if (sig.duration_s() < 2.0) throw SignalTooShort("alignment needs >= 2 s of audio");
    if (log.timestamps_s.back() - log.timestamps_s.front() < 2.0)
        throw SignalTooShort("alignment needs >= 2 s of flight log");

    const auto spec = stft(sig);
    const double frame_dt = static_cast<double>(spec.hop) / spec.sample_rate;

    // blade-passing band from the median rotor speed
    const double bpf = median_rpm(log) / 60.0 * blade_count_per_rotor;
    double f_lo = bpf * 0.8, f_hi = bpf * 1.2;
    if (!(bpf > 1.0) || f_lo >= sig.sample_rate / 2.0) {
        f_lo = 0.0;
        f_hi = sig.sample_rate / 2.0;  // featureless log: fall back to broadband
    }
    std::vector<double> audio_env(spec.n_frames, 0.0);
    for (std::size_t f = 0; f < spec.n_frames; ++f) {
        double acc = 0.0;
        for (std::size_t b = 0; b < spec.n_bins; ++b) {
            const double freq = spec.bin_frequency(b);
            if (freq < f_lo || freq > f_hi) continue;
            acc += std::norm(spec.at(f, b));
        }
        audio_env[f] = acc;
    }

    // summed RPM sampled on the same frame grid, relative to the log start
    const auto rpm = summed_rpm(log);
    const double t0 = log.timestamps_s.front();
    const double log_span = log.timestamps_s.back() - t0;
    const auto n_log = static_cast<std::size_t>(log_span / frame_dt) + 1;
    std::vector<double> log_env(n_log);
    for (std::size_t i = 0; i < n_log; ++i) {
        const double t = t0 + static_cast<double>(i) * frame_dt;
        const auto it =
            std::upper_bound(log.timestamps_s.begin(), log.timestamps_s.end(), t);
        if (it == log.timestamps_s.begin()) {
            log_env[i] = rpm.front();
        } else if (it == log.timestamps_s.end()) {
            log_env[i] = rpm.back();
        } else {
            const auto hi = static_cast<std::size_t>(it - log.timestamps_s.begin());
            const double w =
                (t - log.timestamps_s[hi - 1]) / (log.timestamps_s[hi] - log.timestamps_s[hi - 1]);
            log_env[i] = rpm[hi - 1] + w * (rpm[hi] - rpm[hi - 1]);
        }
    }

    const std::size_t min_overlap =
        std::max<std::size_t>(10, std::min(audio_env.size(), log_env.size()) / 4);
    const long max_lag = static_cast<long>(audio_env.size()) - 1;
    const long min_lag = -(static_cast<long>(log_env.size()) - 1);

    AlignmentResult res;
    double best = -2.0;
    for (long lag = min_lag; lag <= max_lag; ++lag) {
        const double c = lag_correlation(audio_env, log_env, lag, min_overlap);
        if (c > best) {
            best = c;
            res.offset_s = static_cast<double>(lag) * frame_dt;
        }
    }
    res.peak_correlation = best;
    res.ambiguous = best < 0.2;
    return res;
}

}  // namespace psychoak
