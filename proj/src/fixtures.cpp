#include "psychoak/fixtures.hpp"

#include <cmath>
#include <numbers>

#include "psychoak/flightlog.hpp"
#include "psychoak/manifest.hpp"
#include "psychoak/models.hpp"
#include "psychoak/segments.hpp"
#include "psychoak/wav.hpp"

namespace psychoak {

namespace {

constexpr double kFixtureRate = 44100.0;
constexpr double kManeuverBlockS = 2.5;
constexpr double kCueMarginS = 0.15;

// rotor fundamentals loosely matching the fleet's observed low-frequency peaks
double fundamental_hz(const std::string& drone) {
    if (drone == "DJI Matrice") return 95.0;
    if (drone == "DJI Mavic") return 195.0;
    if (drone == "Holybro S500") return 160.0;
    return 120.0;  // Tarot X6
}

double calibration_gain_for(std::size_t drone_idx) {
    constexpr double gains[4] = {0.05, 0.08, 0.10, 0.06};
    return gains[drone_idx % 4];
}

// rpm profile over the maneuver blocks: a distinctive staircase that the
// alignment stage can lock onto
double rpm_profile(double t, double block_s, int n_blocks) {
    const int block = std::min(static_cast<int>(t / block_s), n_blocks - 1);
    const double ramp = std::min(t / 0.8, 1.0);  // spin-up
    return ramp * (1.0 + 0.06 * block);
}

}  // namespace

FixturePaths generate_fixture_workspace(const std::filesystem::path& dir,
                                        std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    const auto& fleet = paper_fleet();
    const auto& maneuvers = maneuver_vocabulary();
    const int n_blocks = static_cast<int>(maneuvers.size());
    const double total_s = kManeuverBlockS * n_blocks;
    const auto n_samples = static_cast<std::size_t>(total_s * kFixtureRate);

    FixturePaths out;
    Rng rng(seed);

    for (std::size_t di = 0; di < fleet.size(); ++di) {
        const DroneSpec& spec = fleet[di];
        const MicGeometry geom = paper_geometry(spec.name);
        const double f0 = fundamental_hz(spec.name);
        const double gain = calibration_gain_for(di);

        std::string drone_dir = spec.name;
        for (auto& c : drone_dir)
            if (c == ' ') c = '_';
        const auto base = dir / drone_dir;
        std::filesystem::create_directories(base / "audio");

        // one flight log per drone
        FlightLog log;
        log.native_rate_hz = 10.0;
        const double rpm0 = f0 * 60.0 / spec.blade_count_per_rotor;
        for (double t = 0.0; t <= total_s + 1e-9; t += 0.1) {
            log.timestamps_s.push_back(t);
            const double z = geom.hr * std::clamp(t / 1.5, 0.0, 1.0) *
                             std::clamp((total_s - t) / 1.5, 0.0, 1.0);
            // linear drift, removed by the position correction
            log.position_m.push_back({0.02 * t, -0.013 * t, z});
        }
        log.rpm_per_rotor.assign(static_cast<std::size_t>(spec.n_rot), {});
        for (std::size_t r = 0; r < log.rpm_per_rotor.size(); ++r) {
            for (double t : log.timestamps_s)
                log.rpm_per_rotor[r].push_back(rpm0 *
                                               rpm_profile(t, kManeuverBlockS, n_blocks));
        }
        save_flight_log(base / "flight_log.json", log);

        // cue file shared by all microphones
        std::vector<ManeuverSegment> cues;
        for (int b = 0; b < n_blocks; ++b)
            cues.push_back({maneuvers[static_cast<std::size_t>(b)],
                            b * kManeuverBlockS + kCueMarginS,
                            (b + 1) * kManeuverBlockS - kCueMarginS});
        save_cues(base / "cues.json", cues);

        SessionManifest manifest;
        manifest.drone = spec;
        manifest.geometry = geom;
        manifest.session = {"NE", 8.0, 12.0, 21.0, 0.49, 1018.0, "2023-06-01"};
        manifest.base_dir = base;

        for (int mic = 1; mic <= 7; ++mic) {
            const double dist = mic_distance(geom, mic);
            const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

            std::vector<double> samples(n_samples, 0.0);
            // pressure scale: heavier drones louder, SPL falls with distance
            const double p_base =
                0.22 * std::pow(spec.weight_kg, 0.35) * (4.0 / std::max(dist, 1.0));

            for (std::size_t i = 0; i < n_samples; ++i) {
                const double t = static_cast<double>(i) / kFixtureRate;
                const int block =
                    std::min(static_cast<int>(t / kManeuverBlockS), n_blocks - 1);
                const double env = rpm_profile(t, kManeuverBlockS, n_blocks);
                const double level = p_base * env * env * (1.0 + 0.05 * block);

                // rotor harmonics
                double v = 0.0;
                for (int h = 1; h <= 5; ++h)
                    v += std::sin(2.0 * std::numbers::pi * f0 * h * t + phase * h) /
                         static_cast<double>(h);
                // a high-frequency component so sharpness varies with the drone
                v += 0.18 * (1.0 + 0.1 * block) *
                     std::sin(2.0 * std::numbers::pi * (3200.0 + 140.0 * di) * t);
                // slow and fast modulation for fluctuation and roughness
                const double am =
                    1.0 + 0.25 * std::cos(2.0 * std::numbers::pi * 4.0 * t) +
                    0.15 * std::cos(2.0 * std::numbers::pi * 70.0 * t);
                samples[i] = level * am * v;
            }
            // stored digital units; calibration gain restores pascal
            for (auto& v : samples) v /= gain * 32.0;
            write_wav_float32(base / "audio" / ("m" + std::to_string(mic) + ".wav"),
                              {samples}, kFixtureRate);

            RecordingEntry e;
            e.path = "audio/m" + std::to_string(mic) + ".wav";
            e.mic_id = mic;
            e.calibration_gain = gain * 32.0;
            e.cue_file = "cues.json";
            e.flight_log = "flight_log.json";
            manifest.recordings.push_back(e);
        }
        const auto mpath = base / "manifest.json";
        save_manifest(mpath, manifest);
        out.manifests.push_back(mpath);
    }
    return out;
}

Dataset make_linear_dataset(std::uint64_t seed, double noise_sigma) {
    Rng rng(seed);
    Dataset ds;
    const auto& maneuvers = maneuver_vocabulary();
    for (const auto& spec : paper_fleet()) {
        const MicGeometry geom = paper_geometry(spec.name);
        for (int mic = 1; mic <= 7; ++mic) {
            for (std::size_t m = 0; m < maneuvers.size(); ++m) {
                FeatureRow row;
                row.aspect_ratio = spec.aspect_ratio();
                row.n_rot = spec.n_rot;
                row.weight_kg = spec.weight_kg;
                row.mic_dist_m = mic_distance(geom, mic);
                row.maneuver_code = static_cast<double>(m);
                const auto f = row.features();
                row.pa = kLinearFixtureBias;
                for (std::size_t i = 0; i < f.size(); ++i)
                    row.pa += kLinearFixtureWeights[i] * f[i];
                if (noise_sigma > 0.0) row.pa += rng.gaussian(0.0, noise_sigma);
                ds.rows.push_back(row);
                ds.drone.push_back(spec.name);
                ds.mic_id.push_back(mic);
                ds.maneuver.push_back(maneuvers[m]);
            }
        }
    }
    return ds;
}

}  // namespace psychoak
