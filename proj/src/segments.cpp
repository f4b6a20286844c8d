#include "psychoak/segments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "psychoak/errors.hpp"

namespace psychoak {

using nlohmann::json;

std::vector<ManeuverSegment> load_cues(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ManifestError("cannot open cue file: " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ManifestError("cue file parse error in " + path.string() + ": " + e.what());
    }
    if (!j.is_array()) throw ManifestError("cue file must be a JSON array: " + path.string());
    std::vector<ManeuverSegment> cues;
    for (const auto& item : j) {
        ManeuverSegment c;
        try {
            c.label = item.at("label").get<std::string>();
            c.start_s = item.at("start_s").get<double>();
            c.end_s = item.at("end_s").get<double>();
        } catch (const json::exception& e) {
            throw ManifestError("cue schema error in " + path.string() + ": " + e.what());
        }
        cues.push_back(std::move(c));
    }
    return cues;
}

void save_cues(const std::filesystem::path& path, const std::vector<ManeuverSegment>& cues) {
    json j = json::array();
    for (const auto& c : cues)
        j.push_back({{"label", c.label}, {"start_s", c.start_s}, {"end_s", c.end_s}});
    std::ofstream os(path);
    if (!os) throw WriteError("cannot write cue file: " + path.string());
    os << j.dump(2) << '\n';
}

std::map<std::string, CalibratedSignal> segment(const CalibratedSignal& sig,
                                                const std::vector<ManeuverSegment>& cues) {
    const double dur = sig.duration_s();
    std::vector<ManeuverSegment> sorted = cues;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.start_s < b.start_s; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& c = sorted[i];
        if (!(c.start_s >= 0.0 && c.start_s < c.end_s))
            throw CueOutOfRange("cue '" + c.label + "' has invalid bounds");
        if (c.end_s > dur + 1e-9)
            throw CueOutOfRange("cue '" + c.label + "' ends beyond signal duration");
        if (i > 0 && c.start_s < sorted[i - 1].end_s - 1e-9)
            throw CueOverlapError("cues '" + sorted[i - 1].label + "' and '" + c.label +
                                  "' overlap");
    }

    std::map<std::string, CalibratedSignal> out;
    for (const auto& c : cues) {
        const auto a = static_cast<std::size_t>(std::llround(c.start_s * sig.sample_rate));
        const auto b = static_cast<std::size_t>(std::llround(c.end_s * sig.sample_rate));
        CalibratedSignal slice;
        slice.sample_rate = sig.sample_rate;
        slice.mic_id = sig.mic_id;
        slice.calibration_gain = sig.calibration_gain;
        slice.samples.assign(sig.samples.begin() + static_cast<std::ptrdiff_t>(a),
                             sig.samples.begin() +
                                 static_cast<std::ptrdiff_t>(std::min(b, sig.samples.size())));
        out.emplace(c.label, std::move(slice));
    }
    return out;
}

}  // namespace psychoak
