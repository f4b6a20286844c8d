#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psychoak {

struct DroneSpec {
    std::string name;
    double l_arm_mm = 0.0;
    double l_rot_mm = 0.0;  // rotor radius
    int n_rot = 0;
    double weight_kg = 0.0;
    int blade_count_per_rotor = 2;

    double aspect_ratio() const { return l_arm_mm / l_rot_mm; }
};

struct SessionMeta {
    std::string wind_dir;
    double wi_avg_ms = 0.0;
    double wi_max_ms = 0.0;
    double temperature_c = 0.0;
    double humidity = 0.0;  // fraction 0..1
    double pressure_hpa = 0.0;
    std::string date;
};

// Seven microphone positions plus the setup scalars they were derived from.
// The hover point is (0, 0, Hr).
struct MicGeometry {
    std::array<std::array<double, 3>, 7> mic_m{};
    double dr = 0.0, d = 0.0, hr = 0.0, hs = 0.0, hi = 0.0;
};

// Default layout from the setup scalars: four ground microphones on a line at
// spacing d, one low microphone at hs and two elevated at hi.
MicGeometry geometry_from_scalars(double dr, double d, double hr, double hs, double hi);

// The measured fleet and its setups.
const std::vector<DroneSpec>& paper_fleet();
MicGeometry paper_geometry(const std::string& drone_name);

enum class DiscLoadingUnits { Pa, KgPerM2 };

// DL = W g / (N_rot pi l_rot^2); the KgPerM2 variant omits g.
double disc_loading(const DroneSpec& spec, DiscLoadingUnits units = DiscLoadingUnits::Pa);

// Euclidean distance from the microphone to the hover point.
double mic_distance(const MicGeometry& geom, int mic_id);

// Hover=0 .. LateralCruise=6, maneuver vocabulary order.
int encode_maneuver(const std::string& label);

struct FeatureRow {
    double aspect_ratio = 0.0;
    double n_rot = 0.0;
    double weight_kg = 0.0;
    double mic_dist_m = 0.0;
    double maneuver_code = 0.0;
    double pa = 0.0;  // target

    std::array<double, 5> features() const {
        return {aspect_ratio, n_rot, weight_kg, mic_dist_m, maneuver_code};
    }
};
inline constexpr int kFeatureCount = 5;

// Rows with identical physical features belong to one drone.
std::string drone_group_key(const FeatureRow& row);

struct ScalerParams {
    std::array<double, kFeatureCount> min{};
    std::array<double, kFeatureCount> max{};
};

ScalerParams fit_scaler(std::span<const FeatureRow> rows);
std::array<double, kFeatureCount> apply_scaler(const FeatureRow& row,
                                               const ScalerParams& params);
std::array<double, kFeatureCount> unapply_scaler(
    const std::array<double, kFeatureCount>& scaled, const ScalerParams& params);

// Everything needed to emit the dataset rows of one measured session.
struct SessionData {
    DroneSpec spec;
    MicGeometry geometry;
    std::vector<int> mic_ids;
    std::vector<std::string> maneuvers;
    std::map<std::pair<int, std::string>, double> pa;  // (mic, maneuver) -> PA
};

struct Dataset {
    std::vector<FeatureRow> rows;
    std::vector<std::string> drone;     // aligned group labels
    std::vector<int> mic_id;            // aligned microphone ids (0 when unknown)
    std::vector<std::string> maneuver;  // aligned labels
};

// One row per (drone, mic, maneuver); throws IncompleteDataset naming the
// first missing triple. Output is sorted by (drone, mic, maneuver code).
Dataset build_dataset(const std::vector<SessionData>& sessions);

void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds,
                       const std::string& provenance = {});
Dataset read_dataset_csv(const std::filesystem::path& path);

// Pearson correlation, unit diagonal; zero-variance columns correlate 0
// with everything else.
struct CorrelationMatrix {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> values;
};
CorrelationMatrix correlation_matrix(const std::vector<std::string>& columns,
                                     const std::vector<std::vector<double>>& rows);
void write_correlation_csv(const std::filesystem::path& path, const CorrelationMatrix& m,
                           const std::string& provenance = {});

// Mean over microphones within each maneuver, then mean over maneuvers.
double aggregate_pa(std::span<const int> maneuver_codes, std::span<const double> values);

}  // namespace psychoak
