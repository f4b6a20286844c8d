#pragma once

#include <complex>
#include <filesystem>
#include <vector>

#include "psychoak/audio.hpp"

namespace psychoak {

// Complex STFT, frame-major storage. Frames are Hann-windowed and centered
// via reflection padding.
struct Stft {
    std::size_t window_len = 2048;
    std::size_t hop = 512;
    double sample_rate = kStandardRate;
    std::size_t n_frames = 0;
    std::size_t n_bins = 0;  // window_len / 2 + 1
    std::vector<std::complex<double>> data;

    std::complex<double> at(std::size_t frame, std::size_t bin) const {
        return data[frame * n_bins + bin];
    }
    double bin_frequency(std::size_t bin) const {
        return static_cast<double>(bin) * sample_rate / static_cast<double>(window_len);
    }
    double frame_time(std::size_t frame) const {
        return static_cast<double>(frame * hop) / sample_rate;
    }
};

Stft stft(const CalibratedSignal& sig, std::size_t window_len = 2048,
          std::size_t hop = 512);

// |X| per frame/bin, frame-major, same layout as Stft::data.
std::vector<double> magnitudes(const Stft& s);

// 20*log10(mag/ref), floored at (max - 80 dB).
std::vector<double> amplitude_to_db(const std::vector<double>& mag, double ref);

// time_s,freq_hz,level_db rows; values are written losslessly.
void spectrogram_csv(const Stft& s, const std::filesystem::path& out,
                     const std::string& provenance = {});

struct SpectrogramData {
    std::vector<double> time_s, freq_hz, level_db;  // row-aligned columns
};
SpectrogramData read_spectrogram_csv(const std::filesystem::path& path);

}  // namespace psychoak
