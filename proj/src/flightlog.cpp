#include "psychoak/flightlog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "psychoak/errors.hpp"

namespace psychoak {

using nlohmann::json;

void FlightLog::validate() const {
    if (timestamps_s.size() < 2)
        throw InterpolationError("flight log needs at least 2 samples");
    for (std::size_t i = 1; i < timestamps_s.size(); ++i)
        if (!(timestamps_s[i] > timestamps_s[i - 1]))
            throw InterpolationError("flight log timestamps must be strictly increasing");
    for (const auto& r : rpm_per_rotor) {
        if (r.size() != timestamps_s.size())
            throw InterpolationError("rpm channel length mismatch");
        for (double v : r)
            if (v < 0.0) throw InterpolationError("negative rpm in flight log");
    }
    if (!position_m.empty() && position_m.size() != timestamps_s.size())
        throw InterpolationError("position channel length mismatch");
}

FlightLog load_flight_log(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ManifestError("cannot open flight log: " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ManifestError("flight log parse error in " + path.string() + ": " + e.what());
    }
    FlightLog log;
    try {
        log.timestamps_s = j.at("timestamps_s").get<std::vector<double>>();
        log.rpm_per_rotor = j.at("rpm_per_rotor").get<std::vector<std::vector<double>>>();
        if (j.contains("position_m"))
            log.position_m = j["position_m"].get<std::vector<std::array<double, 3>>>();
        log.native_rate_hz = j.value("native_rate_hz", 0.0);
    } catch (const json::exception& e) {
        throw ManifestError("flight log schema error in " + path.string() + ": " + e.what());
    }
    log.validate();
    return log;
}

void save_flight_log(const std::filesystem::path& path, const FlightLog& log) {
    json j;
    j["timestamps_s"] = log.timestamps_s;
    j["rpm_per_rotor"] = log.rpm_per_rotor;
    if (!log.position_m.empty()) j["position_m"] = log.position_m;
    j["native_rate_hz"] = log.native_rate_hz;
    std::ofstream os(path);
    if (!os) throw WriteError("cannot write flight log: " + path.string());
    os << j.dump(2) << '\n';
}

namespace {

// y(t) for piecewise-linear channel over knots ts; clamps outside the span.
double lerp_at(const std::vector<double>& ts, const std::vector<double>& ys, double t) {
    if (t <= ts.front()) return ys.front();
    if (t >= ts.back()) return ys.back();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return ys[lo] + w * (ys[hi] - ys[lo]);
}

}  // namespace

FlightLog interpolate_log(const FlightLog& log, double target_rate_hz) {
    log.validate();
    if (!(target_rate_hz > 0.0))
        throw InterpolationError("target rate must be positive");

    const double t0 = log.timestamps_s.front();
    const double t1 = log.timestamps_s.back();
    const auto n = static_cast<std::size_t>(
                       std::floor((t1 - t0) * target_rate_hz + 1e-9)) +
                   1;

    FlightLog out;
    out.native_rate_hz = target_rate_hz;
    out.timestamps_s.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.timestamps_s[i] = t0 + static_cast<double>(i) / target_rate_hz;
    out.timestamps_s.back() = std::min(out.timestamps_s.back(), t1);
    // keep the exact endpoint on the grid
    if (out.timestamps_s.back() < t1 - 1e-12) {
        out.timestamps_s.push_back(t1);
    }

    out.rpm_per_rotor.resize(log.rotor_count());
    for (std::size_t r = 0; r < log.rotor_count(); ++r) {
        out.rpm_per_rotor[r].resize(out.timestamps_s.size());
        for (std::size_t i = 0; i < out.timestamps_s.size(); ++i)
            out.rpm_per_rotor[r][i] =
                lerp_at(log.timestamps_s, log.rpm_per_rotor[r], out.timestamps_s[i]);
    }
    if (!log.position_m.empty()) {
        std::array<std::vector<double>, 3> coords;
        for (int c = 0; c < 3; ++c) {
            coords[c].resize(log.size());
            for (std::size_t i = 0; i < log.size(); ++i)
                coords[c][i] = log.position_m[i][static_cast<std::size_t>(c)];
        }
        out.position_m.resize(out.timestamps_s.size());
        for (std::size_t i = 0; i < out.timestamps_s.size(); ++i)
            for (int c = 0; c < 3; ++c)
                out.position_m[i][static_cast<std::size_t>(c)] =
                    lerp_at(log.timestamps_s, coords[static_cast<std::size_t>(c)],
                            out.timestamps_s[i]);
    }
    return out;
}

FlightLog correct_position(const FlightLog& log) {
    log.validate();
    FlightLog out = log;
    if (log.position_m.empty()) return out;

    const double t0 = log.timestamps_s.front();
    const double span = log.timestamps_s.back() - t0;
    if (span <= 0.0) return out;
    std::array<double, 3> drift{};
    for (int c = 0; c < 3; ++c)
        drift[static_cast<std::size_t>(c)] =
            log.position_m.back()[static_cast<std::size_t>(c)] -
            log.position_m.front()[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < out.position_m.size(); ++i) {
        const double w = (log.timestamps_s[i] - t0) / span;
        for (int c = 0; c < 3; ++c)
            out.position_m[i][static_cast<std::size_t>(c)] -=
                w * drift[static_cast<std::size_t>(c)];
    }
    return out;
}

std::vector<double> summed_rpm(const FlightLog& log) {
    std::vector<double> sum(log.size(), 0.0);
    for (const auto& r : log.rpm_per_rotor)
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += r[i];
    return sum;
}

double median_rpm(const FlightLog& log) {
    std::vector<double> all;
    for (const auto& r : log.rpm_per_rotor) all.insert(all.end(), r.begin(), r.end());
    if (all.empty()) return 0.0;
    const std::size_t mid = all.size() / 2;
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(mid), all.end());
    return all[mid];
}

}  // namespace psychoak
