#pragma once

#include <filesystem>

#include "psychoak/audio.hpp"

namespace psychoak {

// RIFF/WAVE PCM decoder: 16/24/32-bit integer and 32-bit float.
RawRecording decode_wav(const std::filesystem::path& path);

// Writers used for staging and fixtures.
void write_wav_float32(const std::filesystem::path& path,
                       const std::vector<std::vector<double>>& channels,
                       double sample_rate);
void write_wav_int16(const std::filesystem::path& path,
                     const std::vector<std::vector<double>>& channels,
                     double sample_rate);

}  // namespace psychoak
