#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "psychoak/dataset.hpp"

namespace psychoak {

// Synthetic stand-ins for the unavailable measurement campaign: four drones,
// seven microphones, seven maneuvers, with cue files, flight logs and
// manifests, all deterministic in the seed.
struct FixturePaths {
    std::vector<std::filesystem::path> manifests;
};

FixturePaths generate_fixture_workspace(const std::filesystem::path& dir,
                                        std::uint64_t seed);

// Tabular synthetic dataset over the paper fleet where PA is an exact linear
// function of the five features (plus optional Gaussian target noise).
inline constexpr std::array<double, kFeatureCount> kLinearFixtureWeights = {
    1.2, 0.8, 0.9, -0.6, 0.35};
inline constexpr double kLinearFixtureBias = 10.0;

Dataset make_linear_dataset(std::uint64_t seed, double noise_sigma);

}  // namespace psychoak
