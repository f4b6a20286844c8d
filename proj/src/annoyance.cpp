#include "psychoak/annoyance.hpp"

#include <cmath>

#include "psychoak/errors.hpp"

namespace psychoak {

double n5(std::span<const double> loudness_series) {
    return exceedance_level(loudness_series, 0.05);
}

PaResult pa(const PaInput& input) {
    if (input.n5 < 0.0 || input.s < 0.0 || input.r < 0.0 || input.f < 0.0 ||
        !std::isfinite(input.n5) || !std::isfinite(input.s) || !std::isfinite(input.r) ||
        !std::isfinite(input.f))
        throw DomainError("pa: inputs must be finite and non-negative");

    PaResult out;
    if (input.n5 == 0.0) return out;  // silence

    if (input.s > 1.75)
        out.w_s = (input.s - 1.75) * 0.25 * std::log10(input.n5 + 10.0);
    out.w_fr = 2.18 / std::pow(input.n5, 0.4) * (0.4 * input.f + 0.6 * input.r);
    out.pa = input.n5 * (1.0 + std::sqrt(out.w_s * out.w_s + out.w_fr * out.w_fr));
    return out;
}

PaResult pa_from_segment(const SqmResult& sqm) {
    PaInput in;
    in.n5 = n5(sqm.loudness_t);
    in.s = sqm.sharpness_summary.mean;
    in.r = sqm.roughness_summary.mean;
    in.f = sqm.fluctuation;
    return pa(in);
}

}  // namespace psychoak
