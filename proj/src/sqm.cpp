#include "psychoak/sqm.hpp"

#include <algorithm>
#include <cmath>

#include "psychoak/errors.hpp"
#include "psychoak/loudness.hpp"
#include "psychoak/roughness.hpp"
#include "psychoak/sharpness.hpp"
#include "psychoak/third_octave.hpp"

namespace psychoak {

double exceedance_level(std::span<const double> series, double fraction) {
    if (series.empty()) throw EmptySeries("exceedance level of empty series");
    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    const double rank = std::ceil((1.0 - fraction) * static_cast<double>(sorted.size()));
    const auto idx = static_cast<std::size_t>(
        std::clamp(rank - 1.0, 0.0, static_cast<double>(sorted.size() - 1)));
    return sorted[idx];
}

Summary summarize(std::span<const double> series) {
    if (series.empty()) throw EmptySeries("summarize: empty series");
    Summary s;
    double acc = 0.0;
    s.max = series[0];
    for (double v : series) {
        acc += v;
        s.max = std::max(s.max, v);
    }
    s.mean = acc / static_cast<double>(series.size());
    s.p05_exceeded = exceedance_level(series, 0.05);
    return s;
}

SqmResult compute_sqm(const CalibratedSignal& segment) {
    if (segment.duration_s() < 2.0)
        throw SignalTooShort("SQM computation needs at least 2 s of signal");

    const ThirdOctaveBank bank(segment.sample_rate);
    const auto levels = bank.smoothed_levels(segment, 500.0);
    const auto lp = decimate_series(specific_loudness(levels), 5);

    SqmResult r;
    r.loudness_t = loudness(lp);
    r.sharpness_t = sharpness(lp);
    r.loudness_rate_hz = lp.frame_rate_hz;
    r.sharpness_rate_hz = lp.frame_rate_hz;
    r.roughness_t = roughness(segment);
    r.roughness_rate_hz = kRoughnessBlockRate;
    r.fluctuation = fluctuation_strength(segment);

    r.loudness_summary = summarize(r.loudness_t);
    r.sharpness_summary = summarize(r.sharpness_t);
    r.roughness_summary = summarize(r.roughness_t);
    r.fluctuation_summary = {r.fluctuation, r.fluctuation, r.fluctuation};
    return r;
}

}  // namespace psychoak
