#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "psychoak/models.hpp"

namespace psychoak {

inline constexpr const char* kToolVersion = "psychoak 0.1.0";

// Commands stage their outputs under these directories and never write
// outside the workspace.
struct Workspace {
    std::filesystem::path root;

    std::filesystem::path segments_dir() const { return root / "segments"; }
    std::filesystem::path sqm_dir() const { return root / "sqm"; }
    std::filesystem::path pa_dir() const { return root / "pa"; }
    std::filesystem::path dataset_dir() const { return root / "dataset"; }
    std::filesystem::path models_dir() const { return root / "models"; }
    std::filesystem::path reports_dir() const { return root / "reports"; }
};

std::uint64_t fnv1a_file(const std::filesystem::path& path);

// "tool=<version> seed=<seed> inputs=<path>:<hash>,..." header stamped into
// every output artifact.
std::string provenance_line(std::uint64_t seed,
                            const std::vector<std::filesystem::path>& inputs);

// Stage commands. Each throws a psychoak::Error subclass on failure; the CLI
// maps categories to exit codes.
void cmd_ingest(const Workspace& ws, const std::vector<std::filesystem::path>& manifests,
                std::uint64_t seed);
void cmd_sqm(const Workspace& ws, std::uint64_t seed);
void cmd_pa(const Workspace& ws, std::uint64_t seed);
void cmd_dataset(const Workspace& ws, std::uint64_t seed);
void cmd_correlate(const Workspace& ws, std::uint64_t seed);
void cmd_train(const Workspace& ws, const std::string& family, std::uint64_t seed);
void cmd_validate(const Workspace& ws, const std::string& family, std::uint64_t seed);
void cmd_report(const Workspace& ws, const std::string& family, std::uint64_t seed);

}  // namespace psychoak
