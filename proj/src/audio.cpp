#include "psychoak/audio.hpp"

#include <cmath>

#include "psychoak/errors.hpp"
#include "psychoak/resample.hpp"

namespace psychoak {

CalibratedSignal standardize(const RawRecording& rec, double calibration_gain) {
    if (!(calibration_gain > 0.0))
        throw CalibrationError("calibration_gain must be positive, got " +
                               std::to_string(calibration_gain));
    if (rec.channels.empty() || rec.frames() == 0)
        throw CalibrationError("recording has no samples: " + rec.source_path);

    std::vector<double> mono(rec.frames(), 0.0);
    const double inv_c = 1.0 / static_cast<double>(rec.channel_count());
    for (const auto& ch : rec.channels)
        for (std::size_t i = 0; i < mono.size(); ++i) mono[i] += ch[i] * inv_c;

    CalibratedSignal out;
    out.sample_rate = kStandardRate;
    out.mic_id = rec.mic_id;
    out.calibration_gain = calibration_gain;
    out.samples =
        rec.sample_rate == kStandardRate
            ? std::move(mono)
            : resample(mono, rec.sample_rate, kStandardRate);
    for (auto& s : out.samples) s *= calibration_gain;
    return out;
}

RawRecording extract_channel(const RawRecording& rec, std::size_t channel) {
    if (channel >= rec.channel_count())
        throw DecodeError("channel " + std::to_string(channel) + " not present in " +
                          rec.source_path);
    RawRecording out;
    out.channels = {rec.channels[channel]};
    out.sample_rate = rec.sample_rate;
    out.mic_id = rec.mic_id;
    out.source_path = rec.source_path;
    return out;
}

double rms(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace psychoak
