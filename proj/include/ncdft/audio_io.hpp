// Copyright 2026 The ncdft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file audio_io.hpp
 * @brief WAV ingestion, packetized streaming analysis and spectrogram output.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ncdft/nc_engine.hpp"
#include "ncdft/scale_planner.hpp"

namespace ncdft {

class WavError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Interleaved 16-bit PCM.
struct PcmStream {
    std::uint32_t sample_rate = 48000;
    int channels = 1;
    std::vector<std::int16_t> samples;

    std::size_t frame_count() const { return channels > 0 ? samples.size() / static_cast<std::size_t>(channels) : 0; }
    double duration() const { return static_cast<double>(frame_count()) / sample_rate; }
};

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
    return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}

inline std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}

}  // namespace detail

/// Parses a RIFF/WAVE image held in memory. Accepts PCM (format 1), 16-bit, mono or stereo.
inline PcmStream parse_wav(std::span<const unsigned char> bytes) {
    using detail::read_u16;
    using detail::read_u32;
    if (bytes.size() < 12) throw WavError("wav: truncated RIFF header");
    if (std::memcmp(bytes.data(), "RIFF", 4) != 0) throw WavError("wav: missing RIFF chunk id");
    if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) throw WavError("wav: RIFF form type is not WAVE");

    PcmStream out;
    bool have_fmt = false;
    std::size_t pos = 12;
    while (pos < bytes.size()) {
        if (bytes.size() - pos < 8) throw WavError("wav: truncated chunk header at offset " + std::to_string(pos));
        const std::string id(reinterpret_cast<const char*>(bytes.data() + pos), 4);
        const std::size_t size = read_u32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (size > bytes.size() - body) throw WavError("wav: truncated '" + id + "' chunk");
        const unsigned char* p = bytes.data() + body;

        if (id == "fmt ") {
            if (size < 16) throw WavError("wav: 'fmt ' chunk shorter than 16 bytes");
            const auto format = read_u16(p);
            const auto channels = read_u16(p + 2);
            const auto rate = read_u32(p + 4);
            const auto block_align = read_u16(p + 12);
            const auto bits = read_u16(p + 14);
            if (format != 1) throw WavError("wav: 'fmt ' chunk has unsupported format code " + std::to_string(format));
            if (bits != 16) throw WavError("wav: 'fmt ' chunk has unsupported bit depth " + std::to_string(bits));
            if (channels != 1 && channels != 2)
                throw WavError("wav: 'fmt ' chunk has unsupported channel count " + std::to_string(channels));
            if (rate == 0) throw WavError("wav: 'fmt ' chunk has zero sample rate");
            if (block_align != channels * 2) throw WavError("wav: 'fmt ' chunk has inconsistent block align");
            out.channels = channels;
            out.sample_rate = rate;
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) throw WavError("wav: 'data' chunk precedes 'fmt ' chunk");
            const std::size_t frame_bytes = static_cast<std::size_t>(out.channels) * 2;
            if (size % frame_bytes != 0) throw WavError("wav: truncated 'data' chunk (partial sample frame)");
            out.samples.resize(size / 2);
            for (std::size_t i = 0; i < out.samples.size(); ++i)
                out.samples[i] = static_cast<std::int16_t>(read_u16(p + 2 * i));
            return out;
        }
        pos = body + size + (size & 1);
    }
    throw WavError(have_fmt ? "wav: missing 'data' chunk" : "wav: missing 'fmt ' chunk");
}

inline PcmStream read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw WavError("wav: cannot open " + path.string());
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_wav(bytes);
}

/// Canonical 44-byte-header PCM WAV image.
inline std::string encode_wav(const PcmStream& s) {
    if (s.channels < 1 || s.samples.size() % static_cast<std::size_t>(s.channels) != 0)
        throw std::invalid_argument("encode_wav: sample count not divisible by channel count");
    const auto data_bytes = static_cast<std::uint32_t>(s.samples.size() * 2);
    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    detail::put_u32(out, 36 + data_bytes);
    out += "WAVEfmt ";
    detail::put_u32(out, 16);
    detail::put_u16(out, 1);
    detail::put_u16(out, static_cast<std::uint16_t>(s.channels));
    detail::put_u32(out, s.sample_rate);
    detail::put_u32(out, s.sample_rate * static_cast<std::uint32_t>(s.channels) * 2);
    detail::put_u16(out, static_cast<std::uint16_t>(s.channels * 2));
    detail::put_u16(out, 16);
    out += "data";
    detail::put_u32(out, data_bytes);
    for (const auto v : s.samples) detail::put_u16(out, static_cast<std::uint16_t>(v));
    return out;
}

inline void write_wav(const std::filesystem::path& path, const PcmStream& s) {
    std::ofstream out(path, std::ios::binary);
    const auto image = encode_wav(s);
    out.write(image.data(), static_cast<std::streamsize>(image.size()));
    if (!out) throw WavError("wav: cannot write " + path.string());
}

/// Mono view of a stream; stereo pairs are averaged, rounding halves away from zero.
inline std::vector<std::int16_t> downmix(const PcmStream& s) {
    if (s.channels == 1) return s.samples;
    if (s.channels != 2) throw std::invalid_argument("downmix: only mono and stereo are supported");
    std::vector<std::int16_t> mono(s.frame_count());
    for (std::size_t i = 0; i < mono.size(); ++i) {
        const int sum = int{s.samples[2 * i]} + int{s.samples[2 * i + 1]};
        mono[i] = static_cast<std::int16_t>(sum >= 0 ? (sum + 1) / 2 : (sum - 1) / 2);
    }
    return mono;
}

struct Spectrogram {
    std::vector<SpectrumFrame> frames;
    double frame_interval = 0.0;     // seconds
    double sample_rate = 0.0;
    std::vector<double> bin_labels;  // ideal center frequencies, Hz
};

/**
 * Streams mono samples into an engine and collects frames at a fixed rate.
 *
 * Snapshots are taken at absolute stream positions: every multiple of the
 * engine's recommended IIR interval and every multiple of the frame interval.
 * Frames are the snapshots that fall on frame-interval multiples. Because the
 * schedule depends only on position, output does not depend on how the input
 * is split into packets.
 */
class StreamAnalyzer {
public:
    using SnapshotObserver = std::function<void(const NcEngine&)>;

    StreamAnalyzer(const NoteScaleConfig& config, double frame_rate) : StreamAnalyzer(NcEngine(config), frame_rate) {}

    StreamAnalyzer(NcEngine engine, double frame_rate) : engine_(std::move(engine)) {
        if (!(frame_rate > 0.0) || !std::isfinite(frame_rate))
            throw std::invalid_argument("StreamAnalyzer: frame_rate must be positive");
        const double fs = engine_.plans().front().sample_rate;
        frame_interval_ = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(fs / frame_rate)));
        snapshot_interval_ = static_cast<std::uint64_t>(engine_.recommended_snapshot_interval());
        spectrogram_.frame_interval = static_cast<double>(frame_interval_) / fs;
        spectrogram_.sample_rate = fs;
        for (const auto& p : engine_.plans()) spectrogram_.bin_labels.push_back(p.f_center);
    }

    void set_snapshot_observer(SnapshotObserver observer) { observer_ = std::move(observer); }

    void feed(std::span<const std::int16_t> samples) {
        while (!samples.empty()) {
            const std::uint64_t pos = engine_.sample_position();
            const std::uint64_t next = std::min(next_multiple(pos, snapshot_interval_), next_multiple(pos, frame_interval_));
            const auto take = static_cast<std::size_t>(std::min<std::uint64_t>(next - pos, samples.size()));
            engine_.process_block(samples.first(take));
            samples = samples.subspan(take);
            if (engine_.sample_position() == next) {
                auto frame = engine_.snapshot();
                if (observer_) observer_(engine_);
                if (next % frame_interval_ == 0) spectrogram_.frames.push_back(std::move(frame));
            }
        }
    }

    const Spectrogram& spectrogram() const { return spectrogram_; }
    Spectrogram take_spectrogram() { return std::move(spectrogram_); }
    NcEngine& engine() { return engine_; }
    const NcEngine& engine() const { return engine_; }
    std::uint64_t frame_interval_samples() const { return frame_interval_; }
    std::uint64_t snapshot_interval_samples() const { return snapshot_interval_; }

private:
    static std::uint64_t next_multiple(std::uint64_t pos, std::uint64_t step) { return (pos / step + 1) * step; }

    NcEngine engine_;
    std::uint64_t frame_interval_ = 1;
    std::uint64_t snapshot_interval_ = 1;
    Spectrogram spectrogram_;
    SnapshotObserver observer_;
};

/// Packet size matching a 10 ms delivery period.
inline std::size_t default_packet_size(double sample_rate) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(sample_rate / 100.0)));
}

/**
 * Analyzes a whole stream, feeding the engine packet by packet.
 * @p packet_size 0 selects default_packet_size().
 */
inline Spectrogram stream_analyze(const PcmStream& stream, const NoteScaleConfig& config, double frame_rate,
                                  std::size_t packet_size = 0) {
    if (static_cast<double>(stream.sample_rate) != config.sample_rate)
        throw std::invalid_argument("stream_analyze: stream sample rate " + std::to_string(stream.sample_rate) +
                                    " Hz does not match configured rate; resampling is not supported");
    StreamAnalyzer analyzer(config, frame_rate);
    const auto mono = downmix(stream);
    if (packet_size == 0) packet_size = default_packet_size(config.sample_rate);
    std::span<const std::int16_t> rest(mono);
    while (!rest.empty()) {
        const auto n = std::min(packet_size, rest.size());
        analyzer.feed(rest.first(n));
        rest = rest.subspan(n);
    }
    return analyzer.take_spectrogram();
}

/// CSV with header `time_s,<f1>,<f2>,...` and one row of magnitudes per frame.
inline void write_csv(const Spectrogram& s, std::ostream& out) {
    if (s.frames.empty()) throw std::invalid_argument("write_csv: spectrogram has no frames");
    char buf[64];
    out << "time_s";
    for (const double f : s.bin_labels) {
        std::snprintf(buf, sizeof buf, ",%.4f", f);
        out << buf;
    }
    out << '\n';
    for (const auto& frame : s.frames) {
        std::snprintf(buf, sizeof buf, "%.6f", static_cast<double>(frame.sample_position) / s.sample_rate);
        out << buf;
        for (const double m : frame.magnitudes) {
            std::snprintf(buf, sizeof buf, ",%.9f", m);
            out << buf;
        }
        out << '\n';
    }
}

/// Gray level for magnitude @p m against spectrogram maximum @p m_max; -60 dB and below map to 0.
inline std::uint8_t pgm_level(double m, double m_max) {
    if (!(m_max > 0.0) || !(m > 0.0)) return 0;
    const double db = 20.0 * std::log10(m / m_max);
    const double v = std::round(255.0 * (1.0 + db / 60.0));
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

/// Binary P5 image: one column per frame, one row per bin, highest bin on top.
inline void write_pgm(const Spectrogram& s, std::ostream& out) {
    if (s.frames.empty()) throw std::invalid_argument("write_pgm: spectrogram has no frames");
    const std::size_t width = s.frames.size();
    const std::size_t height = s.frames.front().magnitudes.size();
    double m_max = 0.0;
    for (const auto& f : s.frames)
        for (const double m : f.magnitudes) m_max = std::max(m_max, m);

    out << "P5\n" << width << ' ' << height << "\n255\n";
    std::vector<char> row(width);
    for (std::size_t r = 0; r < height; ++r) {
        const std::size_t bin = height - 1 - r;
        for (std::size_t c = 0; c < width; ++c)
            row[c] = static_cast<char>(pgm_level(s.frames[c].magnitudes[bin], m_max));
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

namespace detail {

template <typename Writer>
void write_file(const std::filesystem::path& path, const Spectrogram& s, Writer writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    writer(s, out);
    out.flush();
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace detail

inline void write_csv(const Spectrogram& s, const std::filesystem::path& path) {
    detail::write_file(path, s, [](const Spectrogram& sg, std::ostream& o) { write_csv(sg, o); });
}

inline void write_pgm(const Spectrogram& s, const std::filesystem::path& path) {
    detail::write_file(path, s, [](const Spectrogram& sg, std::ostream& o) { write_pgm(sg, o); });
}

}  // namespace ncdft
