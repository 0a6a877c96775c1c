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

// Synthetic 16-bit test signals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

namespace ncdft::signals {

inline std::int16_t to_pcm(double v) {
    return static_cast<std::int16_t>(std::clamp(std::round(v), -32768.0, 32767.0));
}

/// Sum of cosines, each with its own amplitude, rounded to 16 bits.
struct Partial {
    double frequency;
    double amplitude;
};

inline std::vector<std::int16_t> tones(std::initializer_list<Partial> partials, double sample_rate,
                                       std::size_t length) {
    std::vector<std::int16_t> out(length);
    for (std::size_t n = 0; n < length; ++n) {
        double v = 0.0;
        for (const auto& p : partials)
            v += p.amplitude * std::cos(2.0 * std::numbers::pi * p.frequency * static_cast<double>(n) / sample_rate);
        out[n] = to_pcm(v);
    }
    return out;
}

inline std::vector<std::int16_t> tone(double frequency, double amplitude, double sample_rate, std::size_t length) {
    return tones({{frequency, amplitude}}, sample_rate, length);
}

/// Uniform random 16-bit samples.
inline std::vector<std::int16_t> white_noise(std::size_t length, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> dist(-32768, 32767);
    std::vector<std::int16_t> out(length);
    for (auto& s : out) s = static_cast<std::int16_t>(dist(rng));
    return out;
}

/// Pink (1/f) noise, Paul Kellet's filter over Gaussian white noise, peaking near -6 dBFS.
inline std::vector<std::int16_t> pink_noise(std::size_t length, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> white(0.0, 1.0);
    double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
    std::vector<std::int16_t> out(length);
    for (auto& s : out) {
        const double w = white(rng);
        b0 = 0.99886 * b0 + w * 0.0555179;
        b1 = 0.99332 * b1 + w * 0.0750759;
        b2 = 0.96900 * b2 + w * 0.1538520;
        b3 = 0.86650 * b3 + w * 0.3104856;
        b4 = 0.55000 * b4 + w * 0.5329522;
        b5 = -0.7616 * b5 - w * 0.0168980;
        const double pink = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
        b6 = w * 0.115926;
        s = to_pcm(pink * 1600.0);
    }
    return out;
}

}  // namespace ncdft::signals
