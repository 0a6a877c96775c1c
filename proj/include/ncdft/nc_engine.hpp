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
 * @file nc_engine.hpp
 * @brief Sliding-window neighbour-component DFT with integer accumulators.
 *
 * Every bin keeps four 64-bit accumulators: the cosine and sine sums of its
 * left and right component bins over the last N samples. An entering sample
 * is multiplied by the current reference entries and added; the sample that
 * leaves the window N pushes later is multiplied by the very same table
 * entries and subtracted. All of this is integer arithmetic, so a window full
 * of zeros always brings the accumulators back to exactly zero.
 *
 * The reference phase of component k at absolute sample s is pi * k * s / N,
 * tracked as the table index (k * s) mod 2N. Because every bin frequency is
 * quantized to k * Fs / (2N) the index never drifts.
 *
 * The table satisfies ref[p + N] = -ref[p] exactly, so the entry a sample
 * leaves with is (-1)^k times the entry the newest sample enters with. Both
 * components of a bin have the same parity (k = M - 1 and M + 1), so each
 * sample costs one shared difference x - (-1)^k * old and four multiply-adds
 * against a single visit-order sequence of N entries per bin.
 *
 * Output is computed on demand: the accumulators are rotated back to a common
 * phase origin, combined as max(0, -(L . R)), square-rooted and normalized.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ncdft/oracle.hpp"
#include "ncdft/ring_buffer.hpp"
#include "ncdft/scale_planner.hpp"

namespace ncdft {

/// Fixed-point scale of the reference tables.
inline constexpr std::int32_t kReferenceScale = 1 << 15;

/// Amplitude that calibrated magnitudes report as 1.0.
inline constexpr double kFullScaleAmplitude = 32767.0;

/**
 * One cycle of exp(i * pi * p / N) for p in [0, 2N), scaled by 2^15 and
 * rounded. The second half is the exact negation of the first.
 */
class ReferenceTable {
public:
    struct Entry {
        std::int32_t cos;
        std::int32_t sin;
    };

    explicit ReferenceTable(int window_len) : window_len_(window_len) {
        if (window_len < 1) throw std::invalid_argument("ReferenceTable: window_len must be positive");
        const auto len = static_cast<std::size_t>(2 * window_len);
        const auto half = static_cast<std::size_t>(window_len);
        entries_.resize(len);
        for (std::size_t p = 0; p < half; ++p) {
            const double theta = std::numbers::pi * static_cast<double>(p) / window_len;
            entries_[p].cos = static_cast<std::int32_t>(std::lround(kReferenceScale * std::cos(theta)));
            entries_[p].sin = static_cast<std::int32_t>(std::lround(kReferenceScale * std::sin(theta)));
            entries_[p + half] = {-entries_[p].cos, -entries_[p].sin};
        }
    }

    int window_len() const { return window_len_; }
    std::size_t size() const { return entries_.size(); }
    const Entry& operator[](std::size_t p) const { return entries_[p]; }
    std::span<const Entry> entries() const { return entries_; }

private:
    int window_len_;
    std::vector<Entry> entries_;
};

/// Reference entries of both components of a bin at one stream position.
struct PairEntry {
    std::int32_t cos_left;
    std::int32_t sin_left;
    std::int32_t cos_right;
    std::int32_t sin_right;
};

/**
 * Entries for positions c in [0, N): element c holds table[(k * c) mod 2N] for
 * k = @p step_left and k = @p step_right. Position q * N + c reads element c,
 * negated when q is odd and the steps are odd.
 */
inline std::vector<PairEntry> pair_sequence(const ReferenceTable& table, int step_left, int step_right) {
    if ((step_left - step_right) % 2 != 0) throw std::invalid_argument("pair_sequence: steps must share parity");
    const std::int64_t len = static_cast<std::int64_t>(table.size());
    std::vector<PairEntry> out(static_cast<std::size_t>(table.window_len()));
    for (std::size_t c = 0; c < out.size(); ++c) {
        const auto& l = table[static_cast<std::size_t>((step_left * static_cast<std::int64_t>(c)) % len)];
        const auto& r = table[static_cast<std::size_t>((step_right * static_cast<std::int64_t>(c)) % len)];
        out[c] = {l.cos, l.sin, r.cos, r.sin};
    }
    return out;
}

/// Accumulator vector of one bin, in the order Re_L, Im_L, Re_R, Im_R.
using Accumulators = std::array<std::int64_t, 4>;

/// Accumulators after phase correction, still in raw integer scale.
struct RotatedBin {
    double re_left;
    double im_left;
    double re_right;
    double im_right;
};

/// Per-bin magnitudes at one stream position.
struct SpectrumFrame {
    std::uint64_t sample_position = 0;
    std::vector<double> magnitudes;      // after IIR smoothing
    std::vector<double> raw_magnitudes;  // before IIR smoothing
};

/// Applies R(theta), theta = pi * phase_index / N, to (re, im).
inline std::pair<double, double> rotate_accumulators(double re, double im, std::int64_t phase_index,
                                                     std::int64_t window_len) {
    if (phase_index == 0) return {re, im};
    const double theta = std::numbers::pi * static_cast<double>(phase_index) / static_cast<double>(window_len);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * re - s * im, s * re + c * im};
}

/// max(0, -(re_l*re_r + im_l*im_r)).
inline double nc_combine(double re_l, double im_l, double re_r, double im_r) {
    const double dot = re_l * re_r + im_l * im_r;
    return dot < 0.0 ? -dot : 0.0;
}

/// Runtime state of one bin.
struct NcBinState {
    std::shared_ptr<const std::vector<PairEntry>> sequence;
    int window_len = 0;
    int table_len = 0;  // 2N
    int step_left = 0;  // M - 1
    int step_right = 0; // M + 1
    bool odd = false;   // steps are odd: entries flip sign every N samples
    int cursor = 0;     // position mod N
    int sign = 1;       // (-1)^(position / N) when odd, else 1
    // Table index (step * position) mod 2N of the next sample, for rotation.
    int phase_left = 0;
    int phase_right = 0;
    std::int64_t re_left = 0;
    std::int64_t im_left = 0;
    std::int64_t re_right = 0;
    std::int64_t im_right = 0;

    Accumulators accumulators() const { return {re_left, im_left, re_right, im_right}; }
};

/**
 * Bank of sliding NC bins sharing one sample buffer.
 *
 * Single-owner state machine: calls must be serialized by the caller.
 */
class NcEngine {
public:
    explicit NcEngine(const NoteScaleConfig& config) : NcEngine(plan_bank(config)) {}

    /// Calibrates every bin against the floating-point oracle.
    explicit NcEngine(std::vector<BinPlan> plans) : NcEngine(plans, calibrate_all(plans)) {}

    NcEngine(std::vector<BinPlan> plans, std::vector<double> calibration)
        : plans_(std::move(plans)), calibration_(std::move(calibration)),
          buffer_(static_cast<std::size_t>(std::max(1, max_window_len(plans_)))) {
        if (plans_.empty()) throw std::invalid_argument("NcEngine: empty bank");
        if (calibration_.size() != plans_.size())
            throw std::invalid_argument("NcEngine: one calibration constant per bin required");

        std::map<int, std::shared_ptr<const ReferenceTable>> tables;
        std::map<std::pair<int, int>, std::shared_ptr<const std::vector<PairEntry>>> sequences;
        bins_.reserve(plans_.size());
        for (const auto& p : plans_) {
            if (p.window_len < kMinWindowLen || p.half_periods < 2 || p.half_periods + 1 >= p.window_len)
                throw std::invalid_argument("NcEngine: bin plan outside the engine's domain");
            auto& table = tables[p.window_len];
            if (!table) table = std::make_shared<const ReferenceTable>(p.window_len);
            auto& seq = sequences[{p.window_len, p.half_periods}];
            if (!seq)
                seq = std::make_shared<const std::vector<PairEntry>>(
                    pair_sequence(*table, p.left_half_periods(), p.right_half_periods()));

            NcBinState b;
            b.sequence = seq;
            b.window_len = p.window_len;
            b.table_len = 2 * p.window_len;
            b.step_left = p.left_half_periods();
            b.step_right = p.right_half_periods();
            b.odd = b.step_left % 2 != 0;
            bins_.push_back(std::move(b));
        }
        raw_.assign(plans_.size(), 0.0);
        smoothed_.assign(plans_.size(), 0.0);

        int shortest = plans_.front().window_len;
        for (const auto& p : plans_) shortest = std::min(shortest, p.window_len);
        snapshot_interval_ = std::max(1, shortest / 2);
    }

    std::size_t bin_count() const { return bins_.size(); }
    const std::vector<BinPlan>& plans() const { return plans_; }
    std::span<const double> calibration() const { return calibration_; }
    const SharedRingBuffer& buffer() const { return buffer_; }

    /// Samples consumed so far.
    std::uint64_t sample_position() const { return buffer_.write_cursor(); }

    /// Snapshot cadence in samples for feeding the IIR: half the shortest window.
    int recommended_snapshot_interval() const { return snapshot_interval_; }

    void process_sample(std::int16_t sample) { process_block(std::span<const std::int16_t>(&sample, 1)); }

    /// Runs bin by bin over the whole block; the sample buffer is updated once at the end.
    void process_block(std::span<const std::int16_t> samples) {
        if (samples.empty()) return;
        const std::size_t len = samples.size();
        for (auto& b : bins_) {
            const auto n = static_cast<std::size_t>(b.window_len);
            const PairEntry* seq = b.sequence->data();
            std::int64_t re_l = b.re_left, im_l = b.im_left, re_r = b.re_right, im_r = b.im_right;
            std::size_t cursor = static_cast<std::size_t>(b.cursor);
            std::int64_t sign = b.sign;
            const std::int64_t leave = b.odd ? -1 : 1;

            std::size_t j = 0;
            while (j < len) {
                // stop at the next sign flip and where the leaving sample moves into this block
                std::size_t end = std::min(len, j + (n - cursor));
                const bool from_buffer = j < n;
                if (from_buffer) end = std::min(end, n);
                for (std::size_t t = j; t < end; ++t, ++cursor) {
                    const std::int64_t old = from_buffer ? buffer_.at_lag(n - t) : samples[t - n];
                    const std::int64_t u = sign * (samples[t] - leave * old);
                    const auto& e = seq[cursor];
                    re_l += u * e.cos_left;
                    im_l -= u * e.sin_left;
                    re_r += u * e.cos_right;
                    im_r -= u * e.sin_right;
                }
                if (cursor == n) {
                    cursor = 0;
                    if (b.odd) sign = -sign;
                }
                j = end;
            }

            b.re_left = re_l;
            b.im_left = im_l;
            b.re_right = re_r;
            b.im_right = im_r;
            b.cursor = static_cast<int>(cursor);
            b.sign = static_cast<int>(sign);
            b.phase_left = advance(b.phase_left, b.step_left, len, b.table_len);
            b.phase_right = advance(b.phase_right, b.step_right, len, b.table_len);
        }
        for (const auto s : samples) buffer_.push(s);
    }

    const NcBinState& bin(std::size_t i) const { return bins_.at(i); }
    Accumulators accumulators(std::size_t i) const { return bins_.at(i).accumulators(); }

    /// Accumulators of bin @p i rotated to a phase origin one past the newest sample.
    RotatedBin rotated(std::size_t i) const {
        const auto& b = bins_.at(i);
        const auto [rl, il] = rotate_accumulators(static_cast<double>(b.re_left),
                                                  static_cast<double>(b.im_left), b.phase_left, b.window_len);
        const auto [rr, ir] = rotate_accumulators(static_cast<double>(b.re_right),
                                                  static_cast<double>(b.im_right), b.phase_right, b.window_len);
        return {rl, il, rr, ir};
    }

    /// Unnormalized combination value of bin @p i (raw integer scale, amplitude^2 * N^2 * R^2).
    double nc_value(std::size_t i) const {
        const auto r = rotated(i);
        return nc_combine(r.re_left, r.im_left, r.re_right, r.im_right);
    }

    /// Calibrated magnitude of bin @p i; linear in input amplitude, 1.0 at full scale.
    double raw_magnitude(std::size_t i) const {
        const auto& p = plans_[i];
        return calibration_[i] * std::sqrt(nc_value(i)) /
               (static_cast<double>(p.window_len) * kReferenceScale * kFullScaleAmplitude);
    }

    /// Raw magnitudes of all bins. Leaves the IIR state alone.
    void measure(std::span<double> out) const {
        if (out.size() != bins_.size()) throw std::invalid_argument("NcEngine::measure: size mismatch");
        for (std::size_t i = 0; i < bins_.size(); ++i) out[i] = raw_magnitude(i);
    }

    /**
     * Moves each bin's IIR state toward the last measured raw magnitude:
     * smoothed += alpha * (raw - smoothed), alpha = 1 - exp(-dt / tau).
     */
    void update_smoothing(std::int64_t elapsed_samples) {
        const double dt = static_cast<double>(elapsed_samples) / plans_.front().sample_rate;
        for (std::size_t i = 0; i < bins_.size(); ++i) {
            const double tau = plans_[i].smoothing_time_constant;
            const double alpha = tau > 0.0 ? 1.0 - std::exp(-dt / tau) : 1.0;
            smoothed_[i] += alpha * (raw_[i] - smoothed_[i]);
        }
    }

    std::span<const double> smoothed() const { return smoothed_; }

    /// Measures, feeds the IIR with the time since the previous snapshot, and reports both.
    SpectrumFrame snapshot() {
        measure(raw_);
        const auto now = sample_position();
        update_smoothing(static_cast<std::int64_t>(now - last_snapshot_));
        last_snapshot_ = now;
        return SpectrumFrame{now, smoothed_, raw_};
    }

    void reset() {
        for (auto& b : bins_) {
            b.phase_left = b.phase_right = 0;
            b.cursor = 0;
            b.sign = 1;
            b.re_left = b.im_left = b.re_right = b.im_right = 0;
        }
        std::fill(raw_.begin(), raw_.end(), 0.0);
        std::fill(smoothed_.begin(), smoothed_.end(), 0.0);
        buffer_.reset();
        last_snapshot_ = 0;
    }

    static std::vector<double> calibrate_all(const std::vector<BinPlan>& plans) {
        std::vector<double> c;
        c.reserve(plans.size());
        for (const auto& p : plans) c.push_back(oracle::calibrate(p));
        return c;
    }

private:
    static int advance(int phase, int step, std::size_t count, int table_len) {
        const auto m = static_cast<std::uint64_t>(table_len);
        return static_cast<int>((static_cast<std::uint64_t>(phase) + (count % m) * static_cast<std::uint64_t>(step)) % m);
    }

    std::vector<BinPlan> plans_;
    std::vector<double> calibration_;
    std::vector<NcBinState> bins_;
    SharedRingBuffer buffer_;
    std::vector<double> raw_;
    std::vector<double> smoothed_;
    std::uint64_t last_snapshot_ = 0;
    int snapshot_interval_ = 1;
};

}  // namespace ncdft
