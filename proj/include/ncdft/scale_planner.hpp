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
 * @file scale_planner.hpp
 * @brief Note-scale bin bank planning.
 *
 * Each bin of the bank is a pair of DFT bins (left and right) that share one
 * window length N and sit exactly one DFT bin spacing apart. The planner picks
 * N so that the bin's center frequency holds an integer number M of
 * half-periods in the window, then quantizes the center to M * Fs / (2N).
 * With that choice the left and right bins hold M - 1 and M + 1 half-periods,
 * which is what makes the integer phase bookkeeping in the engine exact.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncdft {

/// Smallest half-period count accepted for a planned bin (more than two periods).
inline constexpr int kMinHalfPeriods = 5;

/// Smallest usable window.
inline constexpr int kMinWindowLen = 3;

struct NoteScaleConfig {
    double reference_pitch = 440.0;
    int lowest_note_midi = 21;  // A0
    int octaves = 8;
    int bins_per_octave = 24;
    double sample_rate = 48000.0;
    double max_window_seconds = 0.125;

    int bin_count() const { return octaves * bins_per_octave; }

    /// Largest window in samples permitted by max_window_seconds.
    int max_window_len() const {
        return static_cast<int>(std::lround(max_window_seconds * sample_rate));
    }

    void validate() const {
        if (!(reference_pitch > 0.0) || !std::isfinite(reference_pitch))
            throw std::invalid_argument("reference_pitch must be a positive frequency");
        if (bins_per_octave < 1)
            throw std::invalid_argument("bins_per_octave must be at least 1");
        if (octaves < 1)
            throw std::invalid_argument("octaves must be at least 1");
        if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
            throw std::invalid_argument("sample_rate must be positive");
        if (!(max_window_seconds > 0.0) || !std::isfinite(max_window_seconds))
            throw std::invalid_argument("max_window_seconds must be positive");
    }
};

/// Static design of one bin.
struct BinPlan {
    std::size_t index = 0;
    double sample_rate = 0.0;
    double f_center = 0.0;            // ideal, from the note scale
    double target_bandwidth = 0.0;    // designed bandwidth before window rounding
    int window_len = 0;               // N
    int half_periods = 0;             // M
    double f_center_quantized = 0.0;  // M * Fs / (2N)
    double f_left = 0.0;              // (M - 1) * Fs / (2N)
    double f_right = 0.0;             // (M + 1) * Fs / (2N)
    bool is_variable_q = false;
    double smoothing_time_constant = 0.0;  // seconds

    int left_half_periods() const { return half_periods - 1; }
    int right_half_periods() const { return half_periods + 1; }

    /// Realized bandwidth Fs / N, equal to f_right - f_left.
    double bandwidth() const { return sample_rate / window_len; }

    double window_seconds() const { return window_len / sample_rate; }
};

/// Equal-temperament pitch of MIDI note @p note (fractional notes allowed).
inline double note_frequency(double note, double reference_pitch = 440.0) {
    return reference_pitch * std::exp2((note - 69.0) / 12.0);
}

/// Window a plain DFT needs to resolve bins @p delta_f apart. Comparison only.
inline std::int64_t classical_dft_window(double delta_f, double sample_rate) {
    if (!(delta_f > 0.0))
        throw std::invalid_argument("classical_dft_window: delta_f must be positive");
    if (!(sample_rate > 0.0))
        throw std::invalid_argument("classical_dft_window: sample_rate must be positive");
    return static_cast<std::int64_t>(std::ceil(sample_rate / (2.0 * delta_f)));
}

/**
 * Window length holding a whole number of half-periods of @p f_center for the
 * requested bandwidth: round(round(2f/W) * Fs / (2f)).
 */
inline int window_size(double f_center, double target_bandwidth, double sample_rate) {
    if (!(sample_rate > 0.0))
        throw std::invalid_argument("window_size: sample_rate must be positive");
    if (!(f_center > 0.0) || !(f_center < sample_rate / 2.0))
        throw std::invalid_argument("window_size: f_center must lie in (0, Nyquist)");
    if (!(target_bandwidth > 0.0) || !(target_bandwidth < f_center))
        throw std::invalid_argument("window_size: target_bandwidth must lie in (0, f_center)");
    const double half_periods = std::round(2.0 * f_center / target_bandwidth);
    const double n = std::round(half_periods * sample_rate / (2.0 * f_center));
    if (n > static_cast<double>(INT32_MAX))
        throw std::invalid_argument("window_size: window does not fit in 32 bits");
    return static_cast<int>(n);
}

namespace detail {

inline void fail_plan(const BinPlan& p, const std::string& what) {
    std::ostringstream os;
    os << "plan_bank: bin " << p.index << " (" << p.f_center << " Hz, N=" << p.window_len
       << ", M=" << p.half_periods << ") " << what;
    throw std::invalid_argument(os.str());
}

inline void check_plan(const BinPlan& p, int max_window) {
    if (p.window_len < kMinWindowLen || p.window_len > max_window)
        fail_plan(p, "has a window outside [3, max_window]");
    if (p.half_periods < kMinHalfPeriods)
        fail_plan(p, "holds fewer than 5 half-periods; configuration is infeasible at this sample rate");
    if (!(p.f_right < p.sample_rate / 2.0))
        fail_plan(p, "has its right component at or above Nyquist");
    if (std::abs(p.f_center_quantized - p.f_center) > p.sample_rate / (2.0 * p.window_len))
        fail_plan(p, "quantizes its center by more than half a bin width");
}

}  // namespace detail

/// Builds a BinPlan for a given center and window, quantizing the center.
inline BinPlan make_bin_plan(std::size_t index, double f_center, double target_bandwidth,
                             int window_len, double sample_rate, bool variable_q) {
    BinPlan p;
    p.index = index;
    p.sample_rate = sample_rate;
    p.f_center = f_center;
    p.target_bandwidth = target_bandwidth;
    p.window_len = window_len;
    p.half_periods = static_cast<int>(std::lround(2.0 * f_center * window_len / sample_rate));
    const double half_bin = sample_rate / (2.0 * window_len);
    p.f_center_quantized = p.half_periods * half_bin;
    p.f_left = (p.half_periods - 1) * half_bin;
    p.f_right = (p.half_periods + 1) * half_bin;
    p.is_variable_q = variable_q;
    return p;
}

/**
 * Plans octaves * bins_per_octave bins on the exponential note grid.
 *
 * Interior bins target the neighbour-to-neighbour spacing f(i+1) - f(i-1);
 * the two end bins use twice their one-sided gap. Windows longer than
 * max_window_seconds are clamped and their half-period count re-rounded at the
 * clamped length (variable-Q region). Throws std::invalid_argument when any
 * bin cannot be planned.
 */
inline std::vector<BinPlan> plan_bank(const NoteScaleConfig& config) {
    config.validate();
    const int count = config.bin_count();
    const double fs = config.sample_rate;
    const int max_window = config.max_window_len();
    if (max_window < kMinWindowLen)
        throw std::invalid_argument("plan_bank: max_window_seconds is shorter than 3 samples");

    std::vector<double> centers(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double note = config.lowest_note_midi + 12.0 * i / config.bins_per_octave;
        centers[static_cast<std::size_t>(i)] = note_frequency(note, config.reference_pitch);
    }
    if (!(centers.back() < fs / 2.0)) {
        std::ostringstream os;
        os << "plan_bank: highest bin " << centers.back() << " Hz is not below Nyquist " << fs / 2.0;
        throw std::invalid_argument(os.str());
    }

    std::vector<BinPlan> plans;
    plans.reserve(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double f = centers[i];
        double bandwidth;
        if (centers.size() == 1)
            bandwidth = f * (std::exp2(1.0 / config.bins_per_octave) -
                             std::exp2(-1.0 / config.bins_per_octave));
        else if (i == 0)
            bandwidth = 2.0 * (centers[1] - centers[0]);
        else if (i + 1 == centers.size())
            bandwidth = 2.0 * (centers[i] - centers[i - 1]);
        else
            bandwidth = centers[i + 1] - centers[i - 1];

        int n;
        try {
            n = window_size(f, bandwidth, fs);
        } catch (const std::invalid_argument& e) {
            std::ostringstream os;
            os << "plan_bank: bin " << i << " (" << f << " Hz): " << e.what();
            throw std::invalid_argument(os.str());
        }
        const bool clamped = n > max_window;
        if (clamped) n = max_window;
        plans.push_back(make_bin_plan(i, f, bandwidth, n, fs, clamped));
        detail::check_plan(plans.back(), max_window);
    }

    int longest = 0;
    for (const auto& p : plans) longest = std::max(longest, p.window_len);
    const double t_longest = longest / fs;
    for (auto& p : plans)
        p.smoothing_time_constant = std::max(0.0, t_longest - p.window_seconds()) / 2.0;
    return plans;
}

/// Largest window across a bank.
inline int max_window_len(const std::vector<BinPlan>& plans) {
    int n = 0;
    for (const auto& p : plans) n = std::max(n, p.window_len);
    return n;
}

}  // namespace ncdft
