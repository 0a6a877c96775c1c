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
 * @file oracle.hpp
 * @brief Brute-force floating-point reference for the bin bank.
 *
 * Everything here is evaluated directly from the DFT definition in double
 * precision, one window at a time. Nothing is shared with the integer engine
 * so that the two can be checked against each other.
 */

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "ncdft/scale_planner.hpp"

namespace ncdft::oracle {

inline constexpr double kFullScale = 32767.0;

/**
 * Complex DFT sum of @p samples at frequency @p f:
 * sum_n x[n] * exp(-i * 2*pi*f*(n + phase_origin) / Fs).
 *
 * The real part is the cosine sum; the imaginary part is minus the sine sum.
 */
inline std::complex<double> direct_bin_sum(std::span<const double> samples, double f,
                                           double sample_rate, std::int64_t phase_origin) {
    const double w = 2.0 * std::numbers::pi * f / sample_rate;
    double re = 0.0;
    double im = 0.0;
    for (std::size_t n = 0; n < samples.size(); ++n) {
        const double phase = w * static_cast<double>(static_cast<std::int64_t>(n) + phase_origin);
        re += samples[n] * std::cos(phase);
        im -= samples[n] * std::sin(phase);
    }
    return {re, im};
}

/// max(0, -(Re_L*Re_R + Im_L*Im_R)) in double precision.
inline double nc_combine(std::complex<double> left, std::complex<double> right) {
    const double dot = left.real() * right.real() + left.imag() * right.imag();
    return dot < 0.0 ? -dot : 0.0;
}

/// Left and right sums of the window ending just before sample index @p end.
struct BinPair {
    std::complex<double> left;
    std::complex<double> right;
};

/**
 * Left/right sums for the last window_len samples of @p signal that end at
 * (exclusive) @p end, phase-referenced to @p end.
 */
inline BinPair bin_pair(const BinPlan& plan, std::span<const double> signal, std::size_t end) {
    const auto n = static_cast<std::size_t>(plan.window_len);
    const auto window = signal.subspan(end - n, n);
    const auto origin = -static_cast<std::int64_t>(n);
    return {direct_bin_sum(window, plan.f_left, plan.sample_rate, origin),
            direct_bin_sum(window, plan.f_right, plan.sample_rate, origin)};
}

/// sqrt of the NC value normalized by N and full scale (no calibration).
inline double nc_uncalibrated(const BinPlan& plan, std::span<const double> signal, std::size_t end) {
    const auto pair = bin_pair(plan, signal, end);
    return std::sqrt(nc_combine(pair.left, pair.right)) / (plan.window_len * kFullScale);
}

/// Rectangular-window DFT magnitude at the bin's quantized center, normalized the same way.
inline double rectangular_uncalibrated(const BinPlan& plan, std::span<const double> signal,
                                       std::size_t end) {
    const auto n = static_cast<std::size_t>(plan.window_len);
    const auto sum = direct_bin_sum(signal.subspan(end - n, n), plan.f_center_quantized,
                                    plan.sample_rate, -static_cast<std::int64_t>(n));
    return std::abs(sum) / (plan.window_len * kFullScale);
}

/// Full-scale cosine quantized to 16-bit values, as doubles. No dither.
inline std::vector<double> quantized_tone(double frequency, double sample_rate, std::size_t length,
                                          double amplitude = kFullScale) {
    std::vector<double> x(length);
    const double w = 2.0 * std::numbers::pi * frequency / sample_rate;
    for (std::size_t n = 0; n < length; ++n)
        x[n] = std::round(amplitude * std::cos(w * static_cast<double>(n)));
    return x;
}

/// Number of window positions averaged by calibrate().
inline constexpr int kCalibrationPhases = 4;

/**
 * Gain that makes a full-scale tone at the bin's quantized center read 1.0.
 *
 * Averages the oracle NC output over a few window positions spread across one
 * window so the residual ripple from the tone's negative-frequency image does
 * not bias the constant.
 */
inline double calibrate(const BinPlan& plan) {
    const auto n = static_cast<std::size_t>(plan.window_len);
    const auto tone = quantized_tone(plan.f_center_quantized, plan.sample_rate, 2 * n);
    double sum = 0.0;
    for (int k = 0; k < kCalibrationPhases; ++k) {
        const std::size_t end = n + (n * static_cast<std::size_t>(k)) / kCalibrationPhases;
        sum += nc_uncalibrated(plan, tone, end);
    }
    const double mean = sum / kCalibrationPhases;
    return 1.0 / mean;
}

}  // namespace ncdft::oracle
