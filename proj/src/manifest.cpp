#include "psychoak/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "psychoak/errors.hpp"

namespace psychoak {

using nlohmann::json;

namespace {

template <typename T>
T require(const json& j, const std::string& context, const char* key) {
    if (!j.contains(key))
        throw ManifestError("manifest missing field: " + context + "." + key);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ManifestError("manifest field has wrong type: " + context + "." + key);
    }
}

}  // namespace

SessionManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ManifestError("cannot open manifest: " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ManifestError("manifest parse error in " + path.string() + ": " + e.what());
    }

    SessionManifest m;
    m.base_dir = path.parent_path();

    const json jd = require<json>(j, "manifest", "drone");
    m.drone.name = require<std::string>(jd, "drone", "name");
    m.drone.l_arm_mm = require<double>(jd, "drone", "l_arm_mm");
    m.drone.l_rot_mm = require<double>(jd, "drone", "l_rot_mm");
    m.drone.n_rot = require<int>(jd, "drone", "n_rot");
    m.drone.weight_kg = require<double>(jd, "drone", "weight_kg");
    m.drone.blade_count_per_rotor = jd.value("blade_count_per_rotor", 2);
    if (m.drone.l_arm_mm <= 0 || m.drone.l_rot_mm <= 0 || m.drone.n_rot < 1 ||
        m.drone.weight_kg <= 0)
        throw ManifestError("manifest field out of range: drone dimensions must be positive");

    const json jg = require<json>(j, "manifest", "geometry");
    if (jg.contains("mics")) {
        const auto mics = require<std::vector<std::array<double, 3>>>(jg, "geometry", "mics");
        if (mics.size() != 7)
            throw ManifestError("manifest field geometry.mics must list 7 microphones");
        for (std::size_t i = 0; i < 7; ++i) m.geometry.mic_m[i] = mics[i];
        m.geometry.hr = require<double>(jg, "geometry", "Hr");
    } else {
        m.geometry = geometry_from_scalars(
            require<double>(jg, "geometry", "Dr"), require<double>(jg, "geometry", "d"),
            require<double>(jg, "geometry", "Hr"), require<double>(jg, "geometry", "hs"),
            require<double>(jg, "geometry", "hi"));
    }

    if (j.contains("session")) {
        const json js = j["session"];
        m.session.wind_dir = js.value("wind_dir", "");
        m.session.wi_avg_ms = js.value("wi_avg_ms", 0.0);
        m.session.wi_max_ms = js.value("wi_max_ms", 0.0);
        m.session.temperature_c = js.value("temperature_c", 0.0);
        m.session.humidity = js.value("humidity", 0.0);
        m.session.pressure_hpa = js.value("pressure_hpa", 0.0);
        m.session.date = js.value("date", "");
        if (m.session.humidity < 0.0 || m.session.humidity > 1.0)
            throw ManifestError("manifest field out of range: session.humidity must be 0..1");
    }

    const json jr = require<json>(j, "manifest", "recordings");
    if (!jr.is_array() || jr.empty())
        throw ManifestError("manifest field recordings must be a non-empty array");
    for (std::size_t i = 0; i < jr.size(); ++i) {
        const std::string ctx = "recordings[" + std::to_string(i) + "]";
        RecordingEntry e;
        e.path = require<std::string>(jr[i], ctx, "path");
        e.mic_id = require<int>(jr[i], ctx, "mic_id");
        if (e.mic_id < 1 || e.mic_id > 7)
            throw ManifestError("manifest field out of range: " + ctx + ".mic_id must be 1..7");
        e.calibration_gain = require<double>(jr[i], ctx, "calibration_gain");
        if (!(e.calibration_gain > 0))
            throw ManifestError("manifest field out of range: " + ctx +
                                ".calibration_gain must be positive");
        e.cue_file = require<std::string>(jr[i], ctx, "cue_file");
        if (jr[i].contains("channel")) e.channel = jr[i]["channel"].get<int>();
        if (jr[i].contains("flight_log"))
            e.flight_log = jr[i]["flight_log"].get<std::string>();
        m.recordings.push_back(std::move(e));
    }
    return m;
}

void save_manifest(const std::filesystem::path& path, const SessionManifest& manifest) {
    json j;
    j["drone"] = {{"name", manifest.drone.name},
                  {"l_arm_mm", manifest.drone.l_arm_mm},
                  {"l_rot_mm", manifest.drone.l_rot_mm},
                  {"n_rot", manifest.drone.n_rot},
                  {"weight_kg", manifest.drone.weight_kg},
                  {"blade_count_per_rotor", manifest.drone.blade_count_per_rotor}};
    j["geometry"] = {{"Dr", manifest.geometry.dr},
                     {"d", manifest.geometry.d},
                     {"Hr", manifest.geometry.hr},
                     {"hs", manifest.geometry.hs},
                     {"hi", manifest.geometry.hi}};
    j["session"] = {{"wind_dir", manifest.session.wind_dir},
                    {"wi_avg_ms", manifest.session.wi_avg_ms},
                    {"wi_max_ms", manifest.session.wi_max_ms},
                    {"temperature_c", manifest.session.temperature_c},
                    {"humidity", manifest.session.humidity},
                    {"pressure_hpa", manifest.session.pressure_hpa},
                    {"date", manifest.session.date}};
    json jr = json::array();
    for (const auto& e : manifest.recordings) {
        json je = {{"path", e.path},
                   {"mic_id", e.mic_id},
                   {"calibration_gain", e.calibration_gain},
                   {"cue_file", e.cue_file}};
        if (e.channel) je["channel"] = *e.channel;
        if (e.flight_log) je["flight_log"] = *e.flight_log;
        jr.push_back(je);
    }
    j["recordings"] = jr;
    std::ofstream os(path);
    if (!os) throw WriteError("cannot write manifest: " + path.string());
    os << j.dump(2) << '\n';
}

}  // namespace psychoak
