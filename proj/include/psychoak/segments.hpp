#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "psychoak/audio.hpp"

namespace psychoak {

// The seven reference maneuvers, in their canonical order.
inline const std::vector<std::string>& maneuver_vocabulary() {
    static const std::vector<std::string> v = {
        "Hover", "Yaw", "Ascent", "Descent", "FrontCruise", "BackCruise", "LateralCruise"};
    return v;
}

struct ManeuverSegment {
    std::string label;
    double start_s = 0.0;
    double end_s = 0.0;
};

std::vector<ManeuverSegment> load_cues(const std::filesystem::path& path);
void save_cues(const std::filesystem::path& path, const std::vector<ManeuverSegment>& cues);

// Sample-accurate slices, keyed by maneuver label. Cues must be
// non-overlapping and inside the signal duration.
std::map<std::string, CalibratedSignal> segment(const CalibratedSignal& sig,
                                                const std::vector<ManeuverSegment>& cues);

}  // namespace psychoak
