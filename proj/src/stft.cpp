#include "psychoak/stft.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "psychoak/errors.hpp"
#include "psychoak/fft.hpp"

namespace psychoak {

Stft stft(const CalibratedSignal& sig, std::size_t window_len, std::size_t hop) {
    if (sig.samples.size() < window_len)
        throw SignalTooShort("signal shorter than the STFT window (" +
                             std::to_string(sig.samples.size()) + " < " +
                             std::to_string(window_len) + ")");
    if (hop == 0 || hop > window_len)
        throw ConfigError("stft: need 0 < hop <= window_len");

    const std::size_t n = sig.samples.size();
    const std::size_t pad = window_len / 2;

    // reflection-padded access
    auto sample_at = [&](long idx) -> double {
        long i = idx;
        if (i < 0) i = -i;
        const long last = static_cast<long>(n) - 1;
        if (i > last) i = 2 * last - i;
        i = std::clamp(i, 0L, last);
        return sig.samples[static_cast<std::size_t>(i)];
    };

    std::vector<double> window(window_len);
    for (std::size_t i = 0; i < window_len; ++i)
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                         static_cast<double>(window_len));

    Stft out;
    out.window_len = window_len;
    out.hop = hop;
    out.sample_rate = sig.sample_rate;
    out.n_bins = window_len / 2 + 1;
    out.n_frames = n / hop + 1;
    out.data.resize(out.n_frames * out.n_bins);

    std::vector<std::complex<double>> buf(window_len);
    for (std::size_t f = 0; f < out.n_frames; ++f) {
        const long start = static_cast<long>(f * hop) - static_cast<long>(pad);
        for (std::size_t i = 0; i < window_len; ++i)
            buf[i] = {sample_at(start + static_cast<long>(i)) * window[i], 0.0};
        fft(buf);
        for (std::size_t b = 0; b < out.n_bins; ++b) out.data[f * out.n_bins + b] = buf[b];
    }
    return out;
}

std::vector<double> magnitudes(const Stft& s) {
    std::vector<double> mag(s.data.size());
    for (std::size_t i = 0; i < s.data.size(); ++i) mag[i] = std::abs(s.data[i]);
    return mag;
}

std::vector<double> amplitude_to_db(const std::vector<double>& mag, double ref) {
    if (!(ref > 0.0)) throw ConfigError("amplitude_to_db: ref must be positive");
    constexpr double kAmin = 1e-30;
    std::vector<double> db(mag.size());
    double peak = -1e300;
    for (std::size_t i = 0; i < mag.size(); ++i) {
        db[i] = 20.0 * std::log10(std::max(mag[i], kAmin) / ref);
        peak = std::max(peak, db[i]);
    }
    const double floor_db = peak - 80.0;
    for (auto& v : db) v = std::max(v, floor_db);
    return db;
}

void spectrogram_csv(const Stft& s, const std::filesystem::path& out,
                     const std::string& provenance) {
    std::ofstream os(out);
    if (!os) throw WriteError("cannot open for writing: " + out.string());
    if (!provenance.empty()) os << "# " << provenance << '\n';
    os << "time_s,freq_hz,level_db\n";
    const auto mag = magnitudes(s);
    const auto db = amplitude_to_db(mag, 1.0);
    os.precision(17);
    for (std::size_t f = 0; f < s.n_frames; ++f)
        for (std::size_t b = 0; b < s.n_bins; ++b)
            os << s.frame_time(f) << ',' << s.bin_frequency(b) << ','
               << db[f * s.n_bins + b] << '\n';
    if (!os) throw WriteError("failed writing " + out.string());
}

SpectrogramData read_spectrogram_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DecodeError("cannot open: " + path.string());
    SpectrogramData d;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // column header
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        double v[3];
        for (int c = 0; c < 3; ++c) {
            if (!std::getline(ls, cell, ',')) throw DecodeError("bad row in " + path.string());
            v[c] = std::stod(cell);
        }
        d.time_s.push_back(v[0]);
        d.freq_hz.push_back(v[1]);
        d.level_db.push_back(v[2]);
    }
    return d;
}

}  // namespace psychoak
