#pragma once

#include <array>
#include <filesystem>
#include <vector>

namespace psychoak {

// Flight telemetry: per-rotor RPM plus position, on a shared time base.
struct FlightLog {
    std::vector<double> timestamps_s;                 // strictly increasing
    std::vector<std::vector<double>> rpm_per_rotor;   // rotor-major
    std::vector<std::array<double, 3>> position_m;    // may be empty
    double native_rate_hz = 0.0;

    std::size_t size() const { return timestamps_s.size(); }
    std::size_t rotor_count() const { return rpm_per_rotor.size(); }
    void validate() const;  // throws InterpolationError on malformed data
};

FlightLog load_flight_log(const std::filesystem::path& path);
void save_flight_log(const std::filesystem::path& path, const FlightLog& log);

// Linear interpolation of every channel onto a uniform grid at target_rate.
// Endpoint values are preserved exactly.
FlightLog interpolate_log(const FlightLog& log, double target_rate_hz);

// Removes take-off/landing drift by subtracting a linear-in-time ramp from
// each position coordinate so that position(end) == position(start).
FlightLog correct_position(const FlightLog& log);

// Summed RPM over rotors, one value per log sample.
std::vector<double> summed_rpm(const FlightLog& log);
double median_rpm(const FlightLog& log);

}  // namespace psychoak
