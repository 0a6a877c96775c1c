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
 * @file sweep.hpp
 * @brief Tone-sweep frequency response of a single bin.
 *
 * A sustained full-scale tone is run for two windows; the first window is
 * discarded as transient and the response is the largest magnitude seen at
 * evenly spaced positions across the second window.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncdft/nc_engine.hpp"
#include "ncdft/oracle.hpp"
#include "ncdft/scale_planner.hpp"

namespace ncdft {

enum class SweepSource {
    engine,              // integer engine
    oracle_nc,           // floating-point NC combination
    oracle_rectangular,  // plain rectangular-window DFT bin at the quantized center
};

/// Relative magnitude below which an NC response counts as outside the bin's support.
inline constexpr double kSupportFloor = 1e-2;  // -40 dB

/// Local minima above this relative level are ripple on the lobe, not nulls.
inline constexpr double kNullCeiling = 0.5;

/// Snapshot positions per steady-state window.
inline constexpr int kSweepProbes = 16;

struct ResponseCurve {
    std::vector<double> frequencies;
    std::vector<double> relative_magnitudes;
    double measured_support_width = 0.0;
    double max_out_of_band = 0.0;
    std::size_t peak_index = 0;
    double support_floor = kSupportFloor;  // 0 bounds the lobe by nulls alone
};

namespace detail {

inline std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

struct LobeEdge {
    std::size_t inside;   // last point still on the lobe
    std::size_t outside;  // first point past it (== inside at the sweep boundary)
    bool at_null;         // bounded by a local minimum rather than the floor
};

// Walks from the peak until the curve drops to the floor or turns back up.
inline LobeEdge lobe_edge(const ResponseCurve& c, bool rightward) {
    const auto& m = c.relative_magnitudes;
    std::size_t i = c.peak_index;
    while (true) {
        if (rightward ? i + 1 >= m.size() : i == 0) return {i, i, false};
        const std::size_t j = rightward ? i + 1 : i - 1;
        if (m[j] <= c.support_floor) return {i, j, false};
        if (m[j] > m[i] && m[i] < kNullCeiling) return {i, i, true};
        i = j;
    }
}

inline double edge_frequency(const ResponseCurve& c, const LobeEdge& e) {
    return 0.5 * (c.frequencies[e.inside] + c.frequencies[e.outside]);
}

}  // namespace detail

/// Width of the lobe containing the peak, bounded by the curve's support floor or the first nulls.
inline double lobe_width(const ResponseCurve& c) {
    if (c.frequencies.empty()) return 0.0;
    return detail::edge_frequency(c, detail::lobe_edge(c, true)) -
           detail::edge_frequency(c, detail::lobe_edge(c, false));
}

/**
 * Level of the strongest lobe adjacent to the main lobe, in dB relative to
 * the peak: the first local maximum past each first null. Returns -infinity
 * when neither side reaches a null inside the sweep.
 */
inline double first_sidelobe_db(const ResponseCurve& c) {
    const auto& m = c.relative_magnitudes;
    double level = 0.0;
    for (bool rightward : {false, true}) {
        const auto edge = detail::lobe_edge(c, rightward);
        if (!edge.at_null) continue;
        std::size_t i = edge.inside;
        while (true) {
            if (rightward ? i + 1 >= m.size() : i == 0) break;
            const std::size_t j = rightward ? i + 1 : i - 1;
            if (m[j] < m[i]) break;
            i = j;
        }
        level = std::max(level, m[i]);
    }
    return level > 0.0 ? 20.0 * std::log10(level) : -std::numeric_limits<double>::infinity();
}

/**
 * Steady-state response of one bin to a full-scale tone at @p frequency.
 *
 * @p engine must be a single-bin engine for the same plan; it is reset first.
 */
inline double tone_response(const BinPlan& plan, double frequency, SweepSource source, NcEngine* engine) {
    const auto n = static_cast<std::size_t>(plan.window_len);
    const auto tone = oracle::quantized_tone(frequency, plan.sample_rate, 2 * n);
    std::vector<std::size_t> probes;
    for (int k = 1; k <= kSweepProbes; ++k) probes.push_back(n + (n * static_cast<std::size_t>(k)) / kSweepProbes);

    double best = 0.0;
    if (source == SweepSource::engine) {
        if (engine == nullptr || engine->bin_count() != 1)
            throw std::invalid_argument("tone_response: engine source needs a single-bin engine");
        engine->reset();
        std::size_t pos = 0;
        for (const auto end : probes) {
            for (; pos < end; ++pos) engine->process_sample(static_cast<std::int16_t>(tone[pos]));
            best = std::max(best, engine->raw_magnitude(0));
        }
        return best;
    }
    for (const auto end : probes) {
        const double v = source == SweepSource::oracle_nc ? oracle::nc_uncalibrated(plan, tone, end)
                                                          : oracle::rectangular_uncalibrated(plan, tone, end);
        best = std::max(best, v);
    }
    return best;
}

/**
 * Sweeps @p steps evenly spaced tones over [f_lo, f_hi] through one bin and
 * normalizes the response to its peak.
 */
inline ResponseCurve sweep_response(const BinPlan& plan, double f_lo, double f_hi, int steps, SweepSource source) {
    if (!(f_lo < f_hi)) throw std::invalid_argument("sweep_response: f_lo must be below f_hi");
    if (steps < 100) throw std::invalid_argument("sweep_response: at least 100 steps required");
    if (!(f_lo > 0.0) || !(f_hi < plan.sample_rate / 2.0))
        throw std::invalid_argument("sweep_response: sweep must lie in (0, Nyquist)");

    std::unique_ptr<NcEngine> engine;
    if (source == SweepSource::engine) {
        BinPlan single = plan;
        single.index = 0;
        engine = std::make_unique<NcEngine>(std::vector<BinPlan>{single});
    }

    ResponseCurve c;
    if (source == SweepSource::oracle_rectangular) c.support_floor = 0.0;
    c.frequencies.resize(static_cast<std::size_t>(steps));
    c.relative_magnitudes.resize(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        const double f = f_lo + (f_hi - f_lo) * i / (steps - 1);
        c.frequencies[static_cast<std::size_t>(i)] = f;
        c.relative_magnitudes[static_cast<std::size_t>(i)] = tone_response(plan, f, source, engine.get());
    }

    c.peak_index = detail::argmax(c.relative_magnitudes);
    const double peak = c.relative_magnitudes[c.peak_index];
    if (peak > 0.0)
        for (auto& m : c.relative_magnitudes) m /= peak;

    c.measured_support_width = lobe_width(c);
    const double guard = plan.bandwidth() / 2.0;
    for (std::size_t i = 0; i < c.frequencies.size(); ++i) {
        const double f = c.frequencies[i];
        if (f < plan.f_left - guard || f > plan.f_right + guard)
            c.max_out_of_band = std::max(c.max_out_of_band, c.relative_magnitudes[i]);
    }
    return c;
}

/// Writes `frequency_hz,relative_magnitude` CSV, one row per point.
inline void write_response_csv(const ResponseCurve& c, std::ostream& out) {
    out << "frequency_hz,relative_magnitude\n";
    char line[96];
    for (std::size_t i = 0; i < c.frequencies.size(); ++i) {
        std::snprintf(line, sizeof line, "%.6f,%.9f\n", c.frequencies[i], c.relative_magnitudes[i]);
        out << line;
    }
}

}  // namespace ncdft
