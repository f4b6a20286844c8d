#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "psychoak/dataset.hpp"

namespace psychoak {

struct RecordingEntry {
    std::string path;  // relative to the manifest directory
    int mic_id = 0;
    std::optional<int> channel;  // absent: average all channels
    double calibration_gain = 1.0;
    std::string cue_file;
    std::optional<std::string> flight_log;
};

// One measurement session: one drone, its setup geometry, environmental
// metadata and the per-microphone recordings.
struct SessionManifest {
    DroneSpec drone;
    MicGeometry geometry;
    SessionMeta session;
    std::vector<RecordingEntry> recordings;
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const std::string& rel) const { return base_dir / rel; }
};

// Throws ManifestError naming the offending field.
SessionManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const SessionManifest& manifest);

}  // namespace psychoak
