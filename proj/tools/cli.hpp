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

// Command-line frontend: analyze, sweep, bench, plan.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ncdft/ncdft.hpp"

namespace ncdft::cli {

struct CliConfig {
    NoteScaleConfig scale;

    std::string input;
    std::string out;
    std::string format = "csv";
    double frame_rate = 60.0;

    std::optional<int> bin_index;
    std::optional<double> span;
    int steps = 1000;
    std::string baseline = "none";
    std::string baseline_out;

    double bench_seconds = 10.0;
    std::optional<int> bench_bins;
};

struct BenchResult {
    std::size_t bins = 0;
    std::size_t samples = 0;
    double seconds = 0.0;
    double samples_per_second() const { return samples / seconds; }
    double us_per_sample() const { return 1e6 * seconds / samples; }
};

/**
 * Runs the bank over @p samples and times only the engine loop.
 * Best of @p repeats runs.
 */
inline BenchResult bench_engine(const std::vector<BinPlan>& plans, const std::vector<std::int16_t>& samples,
                                int repeats = 1) {
    NcEngine engine(plans, std::vector<double>(plans.size(), 1.0));
    BenchResult r;
    r.bins = plans.size();
    r.samples = samples.size();
    r.seconds = std::numeric_limits<double>::infinity();
    for (int i = 0; i < repeats; ++i) {
        engine.reset();
        const auto t0 = std::chrono::steady_clock::now();
        engine.process_block(samples);
        const auto t1 = std::chrono::steady_clock::now();
        r.seconds = std::min(r.seconds, std::chrono::duration<double>(t1 - t0).count());
    }
    // keep the work observable
    volatile auto sink = engine.accumulators(0)[0];
    (void)sink;
    return r;
}

namespace detail {

inline void print_plan(const std::vector<BinPlan>& plans, std::ostream& out) {
    out << "index,f_center_hz,f_center_quantized_hz,window_len,half_periods,f_left_hz,f_right_hz,w_nc_hz,variable_q\n";
    char line[256];
    for (const auto& p : plans) {
        std::snprintf(line, sizeof line, "%zu,%.4f,%.4f,%d,%d,%.4f,%.4f,%.4f,%d\n", p.index, p.f_center,
                      p.f_center_quantized, p.window_len, p.half_periods, p.f_left, p.f_right, p.bandwidth(),
                      p.is_variable_q ? 1 : 0);
        out << line;
    }
}

inline std::size_t nearest_bin(const std::vector<BinPlan>& plans, double f) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < plans.size(); ++i)
        if (std::abs(std::log(plans[i].f_center / f)) < std::abs(std::log(plans[best].f_center / f))) best = i;
    return best;
}

inline void write_curve(const ResponseCurve& c, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        write_response_csv(c, out);
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    write_response_csv(c, f);
    if (!f) throw std::runtime_error("write to " + path + " failed");
}

inline int run_analyze(const CliConfig& c, std::ostream& out) {
    const auto stream = read_wav(c.input);
    const auto sg = stream_analyze(stream, c.scale, c.frame_rate);
    if (sg.frames.empty()) throw std::runtime_error("analyze: input is shorter than one frame");
    if (c.out.empty() || c.out == "-") {
        if (c.format == "csv")
            write_csv(sg, out);
        else
            write_pgm(sg, out);
    } else if (c.format == "csv") {
        write_csv(sg, std::filesystem::path(c.out));
    } else {
        write_pgm(sg, std::filesystem::path(c.out));
    }
    return 0;
}

inline int run_sweep(const CliConfig& c, std::ostream& out, std::ostream& err) {
    const auto plans = plan_bank(c.scale);
    const std::size_t index = c.bin_index ? static_cast<std::size_t>(*c.bin_index)
                                          : nearest_bin(plans, c.scale.reference_pitch);
    if (index >= plans.size())
        throw std::invalid_argument("--bin-index " + std::to_string(index) + " is outside the bank (" +
                                    std::to_string(plans.size()) + " bins)");
    const auto& plan = plans[index];
    const double span = c.span.value_or(3.0 * plan.bandwidth());
    const double lo = plan.f_center_quantized - span / 2.0;
    const double hi = plan.f_center_quantized + span / 2.0;

    const auto nc = sweep_response(plan, lo, hi, c.steps, SweepSource::engine);
    write_curve(nc, c.out, out);

    char line[256];
    std::snprintf(line, sizeof line, "bin %zu: f_center_quantized=%.4f Hz N=%d support_width=%.4f Hz expected=%.4f Hz\n",
                  index, plan.f_center_quantized, plan.window_len, nc.measured_support_width, plan.bandwidth());
    err << line;
    if (c.baseline == "rectangular") {
        const auto rect = sweep_response(plan, lo, hi, c.steps, SweepSource::oracle_rectangular);
        std::snprintf(line, sizeof line, "rectangular baseline: main_lobe_width=%.4f Hz expected=%.4f Hz first_sidelobe=%.2f dB\n",
                      rect.measured_support_width, 2.0 * plan.bandwidth(), first_sidelobe_db(rect));
        err << line;
        if (!c.baseline_out.empty()) write_curve(rect, c.baseline_out, out);
    }
    return 0;
}

inline int run_bench(const CliConfig& c, std::ostream& out) {
    NoteScaleConfig scale = c.scale;
    if (c.bench_bins) {
        if (*c.bench_bins % scale.octaves != 0)
            throw std::invalid_argument("--bins must be a multiple of --octaves (" + std::to_string(scale.octaves) + ")");
        scale.bins_per_octave = *c.bench_bins / scale.octaves;
    }
    const auto plans = plan_bank(scale);
    const auto length = static_cast<std::size_t>(std::llround(c.bench_seconds * scale.sample_rate));
    const auto input = signals::pink_noise(length, 1);
    const auto r = bench_engine(plans, input);
    char line[256];
    std::snprintf(line, sizeof line,
                  "bins: %zu\nsamples: %zu\nseconds: %.6f\nsamples_per_second: %.0f\nus_per_sample: %.4f\n"
                  "realtime_factor: %.1f\n",
                  r.bins, r.samples, r.seconds, r.samples_per_second(), r.us_per_sample(),
                  r.samples_per_second() / scale.sample_rate);
    out << line;
    return 0;
}

}  // namespace detail

/// Parses @p argv and runs one subcommand. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CliConfig c;
    CLI::App app{"Note-aligned sliding NC-DFT analyzer", "ncdft"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--sample-rate", c.scale.sample_rate, "Sample rate in Hz")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--bins-per-octave", c.scale.bins_per_octave, "Bins per octave")
        ->check(CLI::Range(1, 1 << 16))->capture_default_str();
    app.add_option("--octaves", c.scale.octaves, "Number of octaves")
        ->check(CLI::Range(1, 64))->capture_default_str();
    app.add_option("--start-note", c.scale.lowest_note_midi, "Lowest bin as a MIDI note number")
        ->capture_default_str();
    app.add_option("--max-window", c.scale.max_window_seconds, "Longest window in seconds")
        ->check(CLI::PositiveNumber)->capture_default_str();

    auto* analyze = app.add_subcommand("analyze", "Write a spectrogram of a 16-bit PCM WAV file");
    analyze->add_option("input", c.input, "Input WAV file")->required();
    analyze->add_option("--out", c.out, "Output path (default: stdout)");
    analyze->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"csv", "pgm"}))->capture_default_str();
    analyze->add_option("--frame-rate", c.frame_rate, "Frames per second")
        ->check(CLI::PositiveNumber)->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Measure one bin's response to a tone sweep");
    sweep->add_option("--bin-index", c.bin_index, "Bin to sweep (default: bin nearest the reference pitch)")
        ->check(CLI::NonNegativeNumber);
    sweep->add_option("--span", c.span, "Total sweep width in Hz, centered on the bin (default: 3 bandwidths)")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--steps", c.steps, "Number of tones")->check(CLI::Range(100, 10000000))->capture_default_str();
    sweep->add_option("--baseline", c.baseline, "Also measure a rectangular-window DFT bin")
        ->check(CLI::IsMember({"rectangular", "none"}))->capture_default_str();
    sweep->add_option("--baseline-out", c.baseline_out, "CSV path for the baseline curve");
    sweep->add_option("--out", c.out, "CSV path (default: stdout)");

    auto* bench = app.add_subcommand("bench", "Time the bank on synthetic pink noise");
    bench->add_option("--seconds", c.bench_seconds, "Duration of synthetic input")
        ->check(CLI::PositiveNumber)->capture_default_str();
    bench->add_option("--bins", c.bench_bins, "Total bin count (spread over --octaves)")
        ->check(CLI::PositiveNumber);

    auto* plan = app.add_subcommand("plan", "Print the planned bin table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
    }

    try {
        c.scale.validate();
        if (*analyze) return detail::run_analyze(c, out);
        if (*sweep) return detail::run_sweep(c, out, err);
        if (*bench) return detail::run_bench(c, out);
        if (*plan) {
            detail::print_plan(plan_bank(c.scale), out);
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace ncdft::cli
