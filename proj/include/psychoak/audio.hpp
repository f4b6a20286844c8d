#pragma once

#include <string>
#include <vector>

namespace psychoak {

inline constexpr double kStandardRate = 22050.0;
inline constexpr double kRefPressure = 2e-5;  // Pa, SPL reference

// Decoded PCM audio, channel-major, samples normalised to [-1, 1].
struct RawRecording {
    std::vector<std::vector<double>> channels;
    double sample_rate = 0.0;
    int mic_id = 0;
    std::string source_path;

    std::size_t channel_count() const { return channels.size(); }
    std::size_t frames() const { return channels.empty() ? 0 : channels[0].size(); }
};

// Pressure-calibrated mono stream.
struct CalibratedSignal {
    std::vector<double> samples;  // Pa
    double sample_rate = kStandardRate;
    int mic_id = 0;
    double calibration_gain = 1.0;  // Pa per digital unit

    double duration_s() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

// Average channels, resample to 22050 Hz, scale to pascal.
CalibratedSignal standardize(const RawRecording& rec, double calibration_gain);

// Keep a single channel of a multichannel recording.
RawRecording extract_channel(const RawRecording& rec, std::size_t channel);

double rms(const std::vector<double>& x);

}  // namespace psychoak
