#include "psychoak/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "psychoak/errors.hpp"
#include "psychoak/segments.hpp"

namespace psychoak {

namespace {
constexpr double kGravity = 9.81;  // m/s^2
}

MicGeometry geometry_from_scalars(double dr, double d, double hr, double hs, double hi) {
    MicGeometry g;
    g.dr = dr;
    g.d = d;
    g.hr = hr;
    g.hs = hs;
    g.hi = hi;
    // m1..m4: ground line below and beside the hover point
    g.mic_m[0] = {0.0, 0.0, 0.0};
    g.mic_m[1] = {d, 0.0, 0.0};
    g.mic_m[2] = {2.0 * d, 0.0, 0.0};
    g.mic_m[3] = {3.0 * d, 0.0, 0.0};
    // m5: low mount, m6/m7: elevated mounts
    g.mic_m[4] = {0.0, 0.0, hs};
    g.mic_m[5] = {d, 0.0, hi};
    g.mic_m[6] = {2.0 * d, 0.0, hi};
    return g;
}

const std::vector<DroneSpec>& paper_fleet() {
    static const std::vector<DroneSpec> fleet = {
        {"DJI Matrice", 452.5, 267.5, 4, 6.30, 2},
        {"DJI Mavic", 177.5, 110.0, 4, 0.92, 2},
        {"Holybro S500", 242.5, 127.5, 4, 0.78, 2},
        {"Tarot X6", 360.0, 167.5, 6, 2.30, 2},
    };
    return fleet;
}

MicGeometry paper_geometry(const std::string& drone_name) {
    if (drone_name == "DJI Matrice")
        return geometry_from_scalars(7.755, 2.585, 7.755, 0.375, 3.878);
    if (drone_name == "DJI Mavic")
        return geometry_from_scalars(6.025, 2.008, 6.025, 0.375, 3.013);
    if (drone_name == "Holybro S500")
        return geometry_from_scalars(6.355, 2.118, 6.355, 0.375, 3.178);
    if (drone_name == "Tarot X6")
        return geometry_from_scalars(6.985, 2.328, 6.985, 0.375, 3.493);
    throw ConfigError("unknown drone: " + drone_name);
}

double disc_loading(const DroneSpec& spec, DiscLoadingUnits units) {
    const double r_m = spec.l_rot_mm / 1000.0;
    const double area = spec.n_rot * std::numbers::pi * r_m * r_m;
    const double load = spec.weight_kg / area;  // kg/m^2
    return units == DiscLoadingUnits::Pa ? load * kGravity : load;
}

double mic_distance(const MicGeometry& geom, int mic_id) {
    if (mic_id < 1 || mic_id > 7)
        throw GeometryError("mic_id must be in 1..7, got " + std::to_string(mic_id));
    const auto& m = geom.mic_m[static_cast<std::size_t>(mic_id - 1)];
    const double dx = m[0], dy = m[1], dz = m[2] - geom.hr;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

int encode_maneuver(const std::string& label) {
    const auto& vocab = maneuver_vocabulary();
    for (std::size_t i = 0; i < vocab.size(); ++i)
        if (vocab[i] == label) return static_cast<int>(i);
    throw VocabularyError("unknown maneuver label: '" + label + "'");
}

std::string drone_group_key(const FeatureRow& row) {
    std::ostringstream os;
    os.precision(9);
    os << row.aspect_ratio << '|' << row.n_rot << '|' << row.weight_kg;
    return os.str();
}

ScalerParams fit_scaler(std::span<const FeatureRow> rows) {
    if (rows.empty()) throw EmptyDataset("fit_scaler: no rows");
    ScalerParams p;
    const auto first = rows[0].features();
    p.min = first;
    p.max = first;
    for (const auto& row : rows) {
        const auto f = row.features();
        for (int i = 0; i < kFeatureCount; ++i) {
            p.min[static_cast<std::size_t>(i)] =
                std::min(p.min[static_cast<std::size_t>(i)], f[static_cast<std::size_t>(i)]);
            p.max[static_cast<std::size_t>(i)] =
                std::max(p.max[static_cast<std::size_t>(i)], f[static_cast<std::size_t>(i)]);
        }
    }
    return p;
}

std::array<double, kFeatureCount> apply_scaler(const FeatureRow& row,
                                               const ScalerParams& params) {
    std::array<double, kFeatureCount> out{};
    const auto f = row.features();
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        const double span = params.max[i] - params.min[i];
        out[i] = span > 0.0 ? (f[i] - params.min[i]) / span : 0.0;
    }
    return out;
}

std::array<double, kFeatureCount> unapply_scaler(
    const std::array<double, kFeatureCount>& scaled, const ScalerParams& params) {
    std::array<double, kFeatureCount> out{};
    for (std::size_t i = 0; i < kFeatureCount; ++i)
        out[i] = params.min[i] + scaled[i] * (params.max[i] - params.min[i]);
    return out;
}

Dataset build_dataset(const std::vector<SessionData>& sessions) {
    Dataset ds;
    for (const auto& s : sessions) {
        for (int mic : s.mic_ids) {
            for (const auto& maneuver : s.maneuvers) {
                const auto it = s.pa.find({mic, maneuver});
                if (it == s.pa.end())
                    throw IncompleteDataset("missing PA for (" + s.spec.name + ", m" +
                                            std::to_string(mic) + ", " + maneuver + ")");
                FeatureRow row;
                row.aspect_ratio = s.spec.aspect_ratio();
                row.n_rot = s.spec.n_rot;
                row.weight_kg = s.spec.weight_kg;
                row.mic_dist_m = mic_distance(s.geometry, mic);
                row.maneuver_code = encode_maneuver(maneuver);
                row.pa = it->second;
                ds.rows.push_back(row);
                ds.drone.push_back(s.spec.name);
                ds.mic_id.push_back(mic);
                ds.maneuver.push_back(maneuver);
            }
        }
    }
    // deterministic order
    std::vector<std::size_t> idx(ds.rows.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (ds.drone[a] != ds.drone[b]) return ds.drone[a] < ds.drone[b];
        if (ds.mic_id[a] != ds.mic_id[b]) return ds.mic_id[a] < ds.mic_id[b];
        return ds.rows[a].maneuver_code < ds.rows[b].maneuver_code;
    });
    Dataset sorted;
    for (std::size_t i : idx) {
        sorted.rows.push_back(ds.rows[i]);
        sorted.drone.push_back(ds.drone[i]);
        sorted.mic_id.push_back(ds.mic_id[i]);
        sorted.maneuver.push_back(ds.maneuver[i]);
    }
    return sorted;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds,
                       const std::string& provenance) {
    std::ofstream os(path);
    if (!os) throw WriteError("cannot write dataset: " + path.string());
    if (!provenance.empty()) os << "# " << provenance << '\n';
    os << "aspect_ratio,n_rot,weight_kg,mic_dist_m,maneuver_code,pa\n";
    os.precision(17);
    for (const auto& r : ds.rows)
        os << r.aspect_ratio << ',' << r.n_rot << ',' << r.weight_kg << ',' << r.mic_dist_m
           << ',' << r.maneuver_code << ',' << r.pa << '\n';
    if (!os) throw WriteError("failed writing " + path.string());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw MissingPrerequisite("dataset file not found: " + path.string());
    Dataset ds;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        double v[6];
        for (int c = 0; c < 6; ++c) {
            if (!std::getline(ls, cell, ','))
                throw DecodeError("bad dataset row in " + path.string());
            v[c] = std::stod(cell);
        }
        ds.rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
    }
    // recover group labels from the physical features
    for (const auto& r : ds.rows) {
        ds.drone.push_back(drone_group_key(r));
        ds.mic_id.push_back(0);
        ds.maneuver.push_back(maneuver_vocabulary()[static_cast<std::size_t>(
            std::clamp<long>(std::lround(r.maneuver_code), 0, 6))]);
    }
    return ds;
}

CorrelationMatrix correlation_matrix(const std::vector<std::string>& columns,
                                     const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 3)
        throw EmptyDataset("correlation_matrix needs at least 3 rows, got " +
                           std::to_string(rows.size()));
    const std::size_t n_cols = columns.size();
    for (const auto& r : rows)
        if (r.size() != n_cols) throw ShapeError("correlation_matrix: ragged rows");

    const auto n = static_cast<double>(rows.size());
    std::vector<double> mean(n_cols, 0.0), var(n_cols, 0.0);
    for (std::size_t c = 0; c < n_cols; ++c) {
        for (const auto& r : rows) mean[c] += r[c];
        mean[c] /= n;
        for (const auto& r : rows) var[c] += (r[c] - mean[c]) * (r[c] - mean[c]);
    }

    CorrelationMatrix m;
    m.columns = columns;
    m.values.assign(n_cols, std::vector<double>(n_cols, 0.0));
    for (std::size_t a = 0; a < n_cols; ++a) {
        m.values[a][a] = 1.0;
        for (std::size_t b = a + 1; b < n_cols; ++b) {
            double cov = 0.0;
            for (const auto& r : rows) cov += (r[a] - mean[a]) * (r[b] - mean[b]);
            const double denom = std::sqrt(var[a] * var[b]);
            const double corr = denom > 1e-24 ? cov / denom : 0.0;
            m.values[a][b] = corr;
            m.values[b][a] = corr;
        }
    }
    return m;
}

void write_correlation_csv(const std::filesystem::path& path, const CorrelationMatrix& m,
                           const std::string& provenance) {
    std::ofstream os(path);
    if (!os) throw WriteError("cannot write correlation matrix: " + path.string());
    if (!provenance.empty()) os << "# " << provenance << '\n';
    os << "column";
    for (const auto& c : m.columns) os << ',' << c;
    os << '\n';
    os.precision(17);
    for (std::size_t r = 0; r < m.columns.size(); ++r) {
        os << m.columns[r];
        for (double v : m.values[r]) os << ',' << v;
        os << '\n';
    }
}

double aggregate_pa(std::span<const int> maneuver_codes, std::span<const double> values) {
    if (values.empty() || maneuver_codes.size() != values.size())
        throw EmptyGroup("aggregate_pa: empty or mismatched groups");
    std::map<int, std::pair<double, int>> per_maneuver;  // sum, count
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto& [sum, count] = per_maneuver[maneuver_codes[i]];
        sum += values[i];
        ++count;
    }
    double acc = 0.0;
    for (const auto& [code, sc] : per_maneuver) acc += sc.first / sc.second;
    return acc / static_cast<double>(per_maneuver.size());
}

}  // namespace psychoak
