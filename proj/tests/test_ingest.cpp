#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "psychoak/align.hpp"
#include "psychoak/audio.hpp"
#include "psychoak/errors.hpp"
#include "psychoak/flightlog.hpp"
#include "psychoak/resample.hpp"
#include "psychoak/segments.hpp"
#include "psychoak/synth.hpp"
#include "psychoak/wav.hpp"

using namespace psychoak;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const auto dir = fs::temp_directory_path() / "psychoak_ingest_test";
    fs::create_directories(dir);
    return dir;
}

std::vector<double> sine(double f, double fs, double dur, double amp) {
    std::vector<double> x(static_cast<std::size_t>(dur * fs));
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = amp * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / fs);
    return x;
}

// independent oracle: truncated Whittaker-Shannon interpolation with a wide
// rectangular window
double dense_sinc_at(const std::vector<double>& x, double fs_in, double t_s) {
    const double pos = t_s * fs_in;
    const long center = std::lround(pos);
    double acc = 0.0;
    for (long k = center - 400; k <= center + 400; ++k) {
        if (k < 0 || k >= static_cast<long>(x.size())) continue;
        const double u = pos - static_cast<double>(k);
        const double s =
            u == 0.0 ? 1.0 : std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
        acc += x[static_cast<std::size_t>(k)] * s;
    }
    return acc;
}

}  // namespace

TEST_CASE("decode_wav: 1 s 16-bit 44100 Hz mono has 44100 samples") {
    const auto path = temp_dir() / "one_second.wav";
    write_wav_int16(path, {sine(440.0, 44100.0, 1.0, 0.5)}, 44100.0);
    const auto rec = decode_wav(path);
    CHECK(rec.sample_rate == 44100.0);
    CHECK(rec.channel_count() == 1);
    CHECK(rec.frames() == 44100);
}

TEST_CASE("decode_wav: all-zero payload decodes to zeros") {
    const auto path = temp_dir() / "zeros.wav";
    write_wav_int16(path, {std::vector<double>(1000, 0.0)}, 22050.0);
    const auto rec = decode_wav(path);
    for (double v : rec.channels[0]) CHECK(v == 0.0);
}

TEST_CASE("decode_wav: float32 round-trip") {
    const auto path = temp_dir() / "float.wav";
    const auto x = sine(1000.0, 22050.0, 0.1, 0.25);
    write_wav_float32(path, {x}, 22050.0);
    const auto rec = decode_wav(path);
    REQUIRE(rec.frames() == x.size());
    for (std::size_t i = 0; i < x.size(); i += 13)
        CHECK(rec.channels[0][i] == doctest::Approx(x[i]).epsilon(1e-6));
}

TEST_CASE("decode_wav: truncated file raises DecodeError") {
    const auto path = temp_dir() / "full.wav";
    write_wav_int16(path, {sine(440.0, 44100.0, 0.5, 0.5)}, 44100.0);
    std::ifstream in(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    in.close();
    const auto cut = temp_dir() / "truncated.wav";
    std::ofstream out(cut, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    CHECK_THROWS_AS(decode_wav(cut), DecodeError);
}

TEST_CASE("decode_wav: non-PCM encoding raises UnsupportedFormat") {
    const auto path = temp_dir() / "alaw.wav";
    write_wav_int16(path, {std::vector<double>(256, 0.1)}, 8000.0);
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(20);
    const char tag[2] = {0x06, 0x00};  // A-law format tag
    f.write(tag, 2);
    f.close();
    CHECK_THROWS_AS(decode_wav(path), UnsupportedFormat);
}

TEST_CASE("standardize: 2 s at 44100 Hz becomes 44100 samples at 22050 Hz") {
    RawRecording rec;
    rec.sample_rate = 44100.0;
    rec.channels = {sine(1000.0, 44100.0, 2.0, 0.5)};
    const auto out = standardize(rec, 1.0);
    CHECK(out.sample_rate == 22050.0);
    CHECK(out.samples.size() == 44100);
}

TEST_CASE("standardize: resampled 1 kHz sine matches the dense-sinc oracle") {
    RawRecording rec;
    rec.sample_rate = 44100.0;
    const auto src = sine(1000.0, 44100.0, 1.0, 0.5);
    rec.channels = {src};
    const auto out = standardize(rec, 1.0);

    double max_err = 0.0;
    for (std::size_t i = 2000; i + 2000 < out.samples.size(); i += 7) {
        const double t = static_cast<double>(i) / 22050.0;
        max_err =
            std::max(max_err, std::abs(out.samples[i] - dense_sinc_at(src, 44100.0, t)));
    }
    CHECK(max_err < 0.005);

    const double r = rms(out.samples);
    CHECK(r == doctest::Approx(0.5 / std::numbers::sqrt2).epsilon(0.01));
}

TEST_CASE("standardize: calibrator tone maps to 1 Pa RMS at 94 dB SPL") {
    RawRecording rec;
    rec.sample_rate = 22050.0;
    rec.channels = {sine(1000.0, 22050.0, 1.0, 0.5)};
    const double digital_rms = 0.5 / std::numbers::sqrt2;
    const double cal = 1.0 / digital_rms;  // 94 dB SPL = 1 Pa RMS re 20 uPa
    const auto out = standardize(rec, cal);
    CHECK(rms(out.samples) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("standardize: rejects non-positive calibration") {
    RawRecording rec;
    rec.sample_rate = 22050.0;
    rec.channels = {std::vector<double>(100, 0.0)};
    CHECK_THROWS_AS(standardize(rec, 0.0), CalibrationError);
    CHECK_THROWS_AS(standardize(rec, -2.0), CalibrationError);
}

TEST_CASE("standardize: channels are averaged") {
    RawRecording rec;
    rec.sample_rate = 22050.0;
    rec.channels = {std::vector<double>(1000, 0.2), std::vector<double>(1000, 0.6)};
    const auto out = standardize(rec, 1.0);
    CHECK(out.samples[500] == doctest::Approx(0.4));
}

TEST_CASE("resample: energy stability of a band-limited tone") {
    const auto x = sine(1000.0, 44100.0, 1.0, 0.3);
    const auto y = resample(x, 44100.0, 22050.0);
    const double rx = rms(x), ry = rms(y);
    CHECK(std::abs(ry - rx) / rx < 0.01);
}

TEST_CASE("resample: identity when rates match") {
    const auto x = sine(100.0, 1000.0, 0.5, 1.0);
    CHECK(resample(x, 1000.0, 1000.0) == x);
}

TEST_CASE("interpolate_log: endpoint preservation and midpoint value") {
    FlightLog log;
    log.timestamps_s = {0.0, 0.5, 1.0};
    log.rpm_per_rotor = {{0.0, 1.0, 0.0}};
    log.native_rate_hz = 2.0;
    const auto up = interpolate_log(log, 22050.0);
    CHECK(up.rpm_per_rotor[0].front() == doctest::Approx(0.0));
    CHECK(up.rpm_per_rotor[0].back() == doctest::Approx(0.0));

    FlightLog two;
    two.timestamps_s = {0.0, 1.0};
    two.rpm_per_rotor = {{0.0, 1.0}};
    const auto up2 = interpolate_log(two, 4.0);
    CHECK(up2.rpm_per_rotor[0][1] == doctest::Approx(0.25));  // value at t = 0.25 s
}

TEST_CASE("interpolate_log: exact on piecewise-linear ground truth and at knots") {
    FlightLog log;
    std::vector<double> ch;
    for (int i = 0; i <= 10; ++i) {
        log.timestamps_s.push_back(0.3 * i);
        ch.push_back(3.0 * (0.3 * i) + 1.0);
    }
    log.rpm_per_rotor = {ch};

    const auto up = interpolate_log(log, 100.0);
    for (std::size_t i = 0; i < up.timestamps_s.size(); ++i)
        CHECK(up.rpm_per_rotor[0][i] ==
              doctest::Approx(3.0 * up.timestamps_s[i] + 1.0).epsilon(1e-12));

    // downsampling at the original knot times reproduces the original values
    FlightLog zig;
    zig.timestamps_s = {0.0, 0.25, 0.5, 0.75, 1.0};
    zig.rpm_per_rotor = {{2.0, 5.0, 1.0, 7.0, 3.0}};
    const auto fine = interpolate_log(zig, 400.0);
    for (std::size_t k = 0; k < zig.timestamps_s.size(); ++k) {
        const auto idx = static_cast<std::size_t>(zig.timestamps_s[k] * 400.0);
        CHECK(fine.rpm_per_rotor[0][idx] ==
              doctest::Approx(zig.rpm_per_rotor[0][k]).epsilon(1e-12));
    }
}

TEST_CASE("interpolate_log: fewer than 2 samples is an error") {
    FlightLog log;
    log.timestamps_s = {0.0};
    log.rpm_per_rotor = {{1.0}};
    CHECK_THROWS_AS(interpolate_log(log, 10.0), InterpolationError);
}

TEST_CASE("correct_position: linear ramp subtraction") {
    FlightLog ramp;
    ramp.timestamps_s = {0.0, 5.0, 10.0};
    ramp.position_m = {{0, 0, 0}, {0.5, 0, 0}, {1, 0, 0}};
    const auto fixed = correct_position(ramp);
    CHECK(fixed.position_m[1][0] == doctest::Approx(0.0));
    CHECK(fixed.position_m[2][0] == doctest::Approx(0.0));
}

TEST_CASE("correct_position: zero drift is the identity") {
    FlightLog log;
    log.timestamps_s = {0.0, 1.0, 2.0};
    log.position_m = {{0, 0, 0}, {1, 2, 3}, {0, 0, 0}};
    const auto out = correct_position(log);
    for (std::size_t i = 0; i < log.position_m.size(); ++i)
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(out.position_m[i][c] == doctest::Approx(log.position_m[i][c]));
}

TEST_CASE("correct_position: injected drift on a closed trajectory is recovered") {
    FlightLog clean;
    for (int i = 0; i <= 50; ++i) {
        clean.timestamps_s.push_back(0.2 * i);
        const double u = std::sin(i * 0.37) * std::cos(i * 0.11);
        clean.position_m.push_back({u, -0.5 * u, std::sin(i * 0.09)});
    }
    clean.position_m.back() = clean.position_m.front();

    FlightLog drifted = clean;
    const std::array<double, 3> drift = {0.7, -0.3, 0.2};
    const double span = clean.timestamps_s.back() - clean.timestamps_s.front();
    for (std::size_t i = 0; i < drifted.position_m.size(); ++i) {
        const double w = clean.timestamps_s[i] / span;
        for (std::size_t c = 0; c < 3; ++c) drifted.position_m[i][c] += w * drift[c];
    }
    const auto out = correct_position(drifted);
    for (std::size_t i = 0; i < out.position_m.size(); ++i)
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(out.position_m[i][c] ==
                  doctest::Approx(clean.position_m[i][c]).epsilon(1e-9));

    // invariant: end equals start coordinate-wise
    for (std::size_t c = 0; c < 3; ++c)
        CHECK(out.position_m.back()[c] == doctest::Approx(out.position_m.front()[c]));
}

namespace {

// audio whose blade-passing band energy follows the log's rpm envelope,
// delayed by audio_delay_s
CalibratedSignal alignment_audio(const FlightLog& log, double audio_delay_s,
                                 double duration_s) {
    CalibratedSignal sig;
    sig.sample_rate = 22050.0;
    sig.samples.assign(static_cast<std::size_t>(duration_s * sig.sample_rate), 0.0);
    const double f0 = median_rpm(log) / 60.0 * 2.0;
    const auto& ts = log.timestamps_s;
    const auto& rpm_ch = log.rpm_per_rotor[0];
    for (std::size_t i = 0; i < sig.samples.size(); ++i) {
        const double t = static_cast<double>(i) / sig.sample_rate;
        const double tl = t - audio_delay_s;
        double rpm = rpm_ch.front();
        if (tl >= ts.back()) {
            rpm = rpm_ch.back();
        } else if (tl > ts.front()) {
            for (std::size_t k = 1; k < ts.size(); ++k) {
                if (tl <= ts[k]) {
                    const double w = (tl - ts[k - 1]) / (ts[k] - ts[k - 1]);
                    rpm = rpm_ch[k - 1] + w * (rpm_ch[k] - rpm_ch[k - 1]);
                    break;
                }
            }
        }
        const double amp = 0.01 * (rpm / 3000.0) * (rpm / 3000.0);
        sig.samples[i] = amp * std::sin(2.0 * std::numbers::pi * f0 * t);
    }
    return sig;
}

FlightLog ramp_log(double duration_s) {
    FlightLog log;
    log.native_rate_hz = 10.0;
    for (double t = 0.0; t <= duration_s + 1e-9; t += 0.1) log.timestamps_s.push_back(t);
    log.rpm_per_rotor.resize(1);
    for (double t : log.timestamps_s) {
        double rpm = 3000.0;
        if (t > 2.0 && t < 2.8) rpm = 3000.0 + 1500.0 * (t - 2.0) / 0.8;
        if (t >= 2.8) rpm = 4500.0 - 900.0 * std::min((t - 2.8) / 1.0, 1.0);
        log.rpm_per_rotor[0].push_back(rpm);
    }
    return log;
}

}  // namespace

TEST_CASE("align_log: simultaneous events give offset 0 within one hop") {
    const auto log = ramp_log(6.0);
    const auto sig = alignment_audio(log, 0.0, 6.0);
    const auto res = align_log(sig, log);
    const double hop_s = 512.0 / 22050.0;
    CHECK(std::abs(res.offset_s) <= hop_s + 1e-9);
    CHECK(!res.ambiguous);
}

TEST_CASE("align_log: audio lagging by 0.7 s is recovered within one hop") {
    const auto log = ramp_log(6.0);
    const auto sig = alignment_audio(log, 0.7, 8.0);
    const auto res = align_log(sig, log);
    const double hop_s = 512.0 / 22050.0;
    CHECK(std::abs(res.offset_s - 0.7) <= hop_s + 1e-9);
    CHECK(!res.ambiguous);
}

TEST_CASE("align_log: shift equivariance") {
    const auto log = ramp_log(6.0);
    const double hop_s = 512.0 / 22050.0;
    const auto base = align_log(alignment_audio(log, 0.3, 8.0), log);
    const auto shifted = align_log(alignment_audio(log, 0.8, 8.0), log);
    CHECK(std::abs((shifted.offset_s - base.offset_s) - 0.5) <= 2.0 * hop_s + 1e-9);
}

TEST_CASE("align_log: constant rpm with stationary audio is ambiguous") {
    FlightLog log;
    log.native_rate_hz = 10.0;
    for (double t = 0.0; t <= 5.0; t += 0.1) log.timestamps_s.push_back(t);
    log.rpm_per_rotor = {std::vector<double>(log.timestamps_s.size(), 3000.0)};
    const auto sig = make_tone(100.0, 60.0, 5.0);
    const auto res = align_log(sig, log);
    CHECK(res.ambiguous);
}

TEST_CASE("segment: a 1 s cue on a 22050 Hz signal yields 22050 samples") {
    const auto sig = make_tone(500.0, 60.0, 3.0);
    const auto slices = segment(sig, {{"Hover", 1.0, 2.0}});
    REQUIRE(slices.count("Hover") == 1);
    CHECK(slices.at("Hover").samples.size() == 22050);
    CHECK(slices.at("Hover").sample_rate == sig.sample_rate);
    CHECK(slices.at("Hover").mic_id == sig.mic_id);
}

TEST_CASE("segment: empty cue list yields empty map") {
    const auto sig = make_tone(500.0, 60.0, 1.0);
    CHECK(segment(sig, {}).empty());
}

TEST_CASE("segment: overlapping cues raise CueOverlapError") {
    const auto sig = make_tone(500.0, 60.0, 3.0);
    CHECK_THROWS_AS(segment(sig, {{"Hover", 0.0, 1.5}, {"Yaw", 1.0, 2.0}}),
                    CueOverlapError);
}

TEST_CASE("segment: cue beyond duration raises CueOutOfRange") {
    const auto sig = make_tone(500.0, 60.0, 1.0);
    CHECK_THROWS_AS(segment(sig, {{"Hover", 0.5, 2.0}}), CueOutOfRange);
}

TEST_CASE("segment: slices concatenated in cue order reproduce the source") {
    const auto sig = make_tone(777.0, 65.0, 2.0);
    std::vector<ManeuverSegment> cues = {
        {"Hover", 0.0, 0.5}, {"Yaw", 0.5, 1.25}, {"Ascent", 1.25, 2.0}};
    const auto slices = segment(sig, cues);
    std::vector<double> joined;
    for (const auto& c : cues) {
        const auto& s = slices.at(c.label).samples;
        joined.insert(joined.end(), s.begin(), s.end());
    }
    REQUIRE(joined.size() == sig.samples.size());
    bool equal = true;
    for (std::size_t i = 0; i < joined.size(); ++i)
        if (joined[i] != sig.samples[i]) equal = false;
    CHECK(equal);
}
