#include "psychoak/wav.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "psychoak/errors.hpp"

namespace psychoak {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t rd_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t rd_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::ofstream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF),
                          static_cast<unsigned char>((v >> 16) & 0xFF),
                          static_cast<unsigned char>((v >> 24) & 0xFF)};
    os.write(reinterpret_cast<const char*>(b), 4);
}
void wr_u16(std::ofstream& os, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF)};
    os.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

RawRecording decode_wav(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DecodeError("cannot open WAV file: " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw DecodeError("not a RIFF/WAVE file: " + path.string());

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::uint32_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        const std::uint32_t size = rd_u32(hdr + 4);
        const std::size_t body = pos + 8;
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (body + 16 > bytes.size() || size < 16)
                throw DecodeError("truncated fmt chunk: " + path.string());
            const unsigned char* f = bytes.data() + body;
            format = rd_u16(f);
            channels = rd_u16(f + 2);
            rate = rd_u32(f + 4);
            bits = rd_u16(f + 14);
            if (format == kFormatExtensible && size >= 40)
                format = rd_u16(f + 24);  // first two bytes of SubFormat GUID
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = size;
            if (body + data_size > bytes.size())
                throw DecodeError("data chunk exceeds file size (truncated file): " +
                                  path.string());
            break;
        }
        pos = body + size + (size & 1);
    }
    if (!have_fmt || data == nullptr)
        throw DecodeError("missing fmt or data chunk: " + path.string());
    if (channels == 0 || rate == 0)
        throw DecodeError("invalid fmt values: " + path.string());

    const bool is_float = format == kFormatFloat;
    if (format != kFormatPcm && !is_float)
        throw UnsupportedFormat("unsupported WAV encoding tag " + std::to_string(format) +
                                ": " + path.string());
    if (is_float && bits != 32)
        throw UnsupportedFormat("only 32-bit float WAV supported: " + path.string());
    if (!is_float && bits != 16 && bits != 24 && bits != 32)
        throw UnsupportedFormat("unsupported PCM bit depth " + std::to_string(bits) + ": " +
                                path.string());

    const std::size_t bytes_per_sample = bits / 8;
    const std::size_t frame_bytes = bytes_per_sample * channels;
    if (data_size % frame_bytes != 0)
        throw DecodeError("data chunk not a whole number of frames: " + path.string());
    const std::size_t n_frames = data_size / frame_bytes;

    RawRecording rec;
    rec.sample_rate = static_cast<double>(rate);
    rec.source_path = path.string();
    rec.channels.assign(channels, std::vector<double>(n_frames));

    for (std::size_t i = 0; i < n_frames; ++i) {
        const unsigned char* fp = data + i * frame_bytes;
        for (std::size_t c = 0; c < channels; ++c) {
            const unsigned char* sp = fp + c * bytes_per_sample;
            double v = 0.0;
            if (is_float) {
                float f;
                std::uint32_t u = rd_u32(sp);
                std::memcpy(&f, &u, 4);
                v = static_cast<double>(f);
            } else if (bits == 16) {
                const auto s = static_cast<std::int16_t>(rd_u16(sp));
                v = static_cast<double>(s) / 32768.0;
            } else if (bits == 24) {
                std::int32_t s = static_cast<std::int32_t>(sp[0]) |
                                 (static_cast<std::int32_t>(sp[1]) << 8) |
                                 (static_cast<std::int32_t>(sp[2]) << 16);
                if (s & 0x800000) s |= ~0xFFFFFF;
                v = static_cast<double>(s) / 8388608.0;
            } else {  // 32-bit int
                const auto s = static_cast<std::int32_t>(rd_u32(sp));
                v = static_cast<double>(s) / 2147483648.0;
            }
            rec.channels[c][i] = v;
        }
    }
    return rec;
}

namespace {

void write_wav(const std::filesystem::path& path,
               const std::vector<std::vector<double>>& channels, double sample_rate,
               bool as_float) {
    if (channels.empty()) throw WriteError("write_wav: no channels");
    const std::size_t n_frames = channels[0].size();
    for (const auto& c : channels)
        if (c.size() != n_frames) throw WriteError("write_wav: ragged channels");

    std::filesystem::create_directories(path.parent_path().empty()
                                            ? std::filesystem::path(".")
                                            : path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw WriteError("cannot open for writing: " + path.string());

    const std::uint16_t nch = static_cast<std::uint16_t>(channels.size());
    const std::uint16_t bits = as_float ? 32 : 16;
    const std::uint32_t byte_rate =
        static_cast<std::uint32_t>(sample_rate) * nch * bits / 8;
    const std::uint16_t block_align = static_cast<std::uint16_t>(nch * bits / 8);
    const std::uint32_t data_size =
        static_cast<std::uint32_t>(n_frames * nch * bits / 8);

    os.write("RIFF", 4);
    wr_u32(os, 36 + data_size);
    os.write("WAVE", 4);
    os.write("fmt ", 4);
    wr_u32(os, 16);
    wr_u16(os, as_float ? kFormatFloat : kFormatPcm);
    wr_u16(os, nch);
    wr_u32(os, static_cast<std::uint32_t>(sample_rate));
    wr_u32(os, byte_rate);
    wr_u16(os, block_align);
    wr_u16(os, bits);
    os.write("data", 4);
    wr_u32(os, data_size);

    for (std::size_t i = 0; i < n_frames; ++i) {
        for (std::size_t c = 0; c < nch; ++c) {
            if (as_float) {
                const float f = static_cast<float>(channels[c][i]);
                std::uint32_t u;
                std::memcpy(&u, &f, 4);
                wr_u32(os, u);
            } else {
                double v = channels[c][i];
                v = std::max(-1.0, std::min(1.0, v));
                const auto s = static_cast<std::int16_t>(std::lround(v * 32767.0));
                wr_u16(os, static_cast<std::uint16_t>(s));
            }
        }
    }
    if (!os) throw WriteError("failed writing WAV: " + path.string());
}

}  // namespace

void write_wav_float32(const std::filesystem::path& path,
                       const std::vector<std::vector<double>>& channels,
                       double sample_rate) {
    write_wav(path, channels, sample_rate, true);
}

void write_wav_int16(const std::filesystem::path& path,
                     const std::vector<std::vector<double>>& channels,
                     double sample_rate) {
    write_wav(path, channels, sample_rate, false);
}

}  // namespace psychoak
