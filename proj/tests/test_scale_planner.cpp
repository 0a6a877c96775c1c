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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>

#include "ncdft/scale_planner.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace ncdft;

TEST_CASE("note_frequency follows equal temperament", "[planner]") {
    CHECK_THAT(note_frequency(69), WithinRel(440.0, 1e-15));
    CHECK_THAT(note_frequency(21), WithinRel(27.5, 1e-12));
    CHECK_THAT(note_frequency(22), WithinAbs(29.1352, 1e-4));
    CHECK_THAT(note_frequency(81, 432.0), WithinRel(864.0, 1e-12));
    // quarter tones are allowed
    CHECK_THAT(note_frequency(69.5), WithinRel(440.0 * std::exp2(1.0 / 24.0), 1e-12));
}

TEST_CASE("classical_dft_window", "[planner]") {
    CHECK(classical_dft_window(24000.0, 48000.0) == 1);
    CHECK(classical_dft_window(100.0, 48000.0) == 240);
    // A0 = 27.5 Hz and A#0 rounded to 29.14 Hz
    const auto n = classical_dft_window(29.14 - 27.5, 48000.0);
    CHECK(std::llabs(n - 14634) <= 1);
    // with the spacing given to three decimals: ceil(48000 / 3.27)
    CHECK(classical_dft_window(1.635, 48000.0) == 14679);
    CHECK_THROWS_AS(classical_dft_window(0.0, 48000.0), std::invalid_argument);
    CHECK_THROWS_AS(classical_dft_window(-1.0, 48000.0), std::invalid_argument);
}

TEST_CASE("window_size keeps whole half-periods", "[planner]") {
    SECTION("mid-range bin") {
        const int n = window_size(440.0, 51.9, 48000.0);
        CHECK(n == 927);
        const int k = static_cast<int>(std::lround(2.0 * 440.0 / 51.9));
        CHECK(k == 17);
        const double realized = 48000.0 / n;
        CHECK(std::abs(realized - 51.9) / 51.9 < 1.0 / k);
    }
    SECTION("quarter-rate tone") {
        const int n = window_size(12000.0, 12000.0 - 1e-9, 48000.0);
        CHECK(n == 4);
        const auto p = make_bin_plan(0, 12000.0, 12000.0, n, 48000.0, false);
        CHECK(p.half_periods == 2);
    }
    SECTION("A0 exceeds the default clamp") {
        const int n = window_size(27.5, 3.27, 48000.0);
        CHECK(n == 14836);
        CHECK(n > NoteScaleConfig{}.max_window_len());
        CHECK(NoteScaleConfig{}.max_window_len() == 6000);
    }
    SECTION("preconditions") {
        CHECK_THROWS_AS(window_size(440.0, 0.0, 48000.0), std::invalid_argument);
        CHECK_THROWS_AS(window_size(440.0, 440.0, 48000.0), std::invalid_argument);
        CHECK_THROWS_AS(window_size(24000.0, 10.0, 48000.0), std::invalid_argument);
        CHECK_THROWS_AS(window_size(-5.0, 1.0, 48000.0), std::invalid_argument);
    }
}

namespace {

void check_bank_invariants(const NoteScaleConfig& config, const std::vector<BinPlan>& plans) {
    const double fs = config.sample_rate;
    const int max_window = config.max_window_len();
    REQUIRE(plans.size() == static_cast<std::size_t>(config.bin_count()));
    int longest = 0;
    for (const auto& p : plans) longest = std::max(longest, p.window_len);

    for (std::size_t i = 0; i < plans.size(); ++i) {
        const auto& p = plans[i];
        INFO("bin " << i << " f=" << p.f_center << " N=" << p.window_len << " M=" << p.half_periods);
        CHECK(p.index == i);
        CHECK(p.window_len >= 3);
        CHECK(p.window_len <= max_window);
        CHECK(p.half_periods >= 5);
        CHECK(p.left_half_periods() == p.half_periods - 1);
        CHECK(p.right_half_periods() == p.half_periods + 1);
        CHECK_THAT(p.f_right - p.f_left, WithinRel(fs / p.window_len, 1e-12));
        CHECK_THAT((p.f_left + p.f_right) / 2.0, WithinRel(p.f_center_quantized, 1e-12));
        CHECK(std::abs(p.f_center_quantized - p.f_center) <= fs / (2.0 * p.window_len));
        CHECK(p.f_right < fs / 2.0);
        CHECK_THAT(p.f_center,
                   WithinRel(note_frequency(config.lowest_note_midi + 12.0 * i / config.bins_per_octave,
                                            config.reference_pitch), 1e-12));
        CHECK(p.is_variable_q == (window_size(p.f_center, p.target_bandwidth, fs) > max_window));
        CHECK_THAT(p.smoothing_time_constant,
                   WithinAbs(std::max(0.0, (longest - p.window_len) / fs) / 2.0, 1e-15));
        if (i > 0) CHECK(p.f_center > plans[i - 1].f_center);
        // end bins use a different bandwidth rule, so only interior neighbours are ordered
        if (i > 1 && i + 1 < plans.size() && !plans[i - 1].is_variable_q)
            CHECK(p.window_len <= plans[i - 1].window_len);
        if (i > 0 && i + 1 < plans.size()) {
            CHECK(plans[i + 1].f_left < p.f_right);
            CHECK_THAT(p.target_bandwidth, WithinRel(plans[i + 1].f_center - plans[i - 1].f_center, 1e-12));
        }
    }
    if (plans.size() > 1) {
        CHECK_THAT(plans.front().target_bandwidth, WithinRel(2.0 * (plans[1].f_center - plans[0].f_center), 1e-12));
        const auto k = plans.size() - 1;
        CHECK_THAT(plans.back().target_bandwidth, WithinRel(2.0 * (plans[k].f_center - plans[k - 1].f_center), 1e-12));
    }
}

}  // namespace

TEST_CASE("plan_bank default configuration", "[planner]") {
    const NoteScaleConfig config;
    const auto plans = plan_bank(config);
    REQUIRE(plans.size() == 192);
    CHECK_THAT(plans.front().f_center, WithinAbs(27.5, 1e-9));
    CHECK_THAT(plans.back().f_center, WithinAbs(6839.6, 0.1));
    check_bank_invariants(config, plans);

    SECTION("low bins are clamped to 0.125 s and become variable-Q") {
        CHECK(plans.front().is_variable_q);
        CHECK(plans.front().window_len == 6000);
        CHECK(plans.front().half_periods == 7);
        CHECK_THAT(plans.front().f_center_quantized, WithinRel(28.0, 1e-12));
        CHECK_FALSE(plans[96].is_variable_q);
    }
    SECTION("A4 bin") {
        const auto& a4 = plans[96];
        CHECK_THAT(a4.f_center, WithinRel(440.0, 1e-12));
        CHECK(a4.window_len == 1909);
        CHECK(a4.half_periods == 35);
        CHECK_THAT(a4.f_center_quantized, WithinRel(35.0 * 48000.0 / (2.0 * 1909.0), 1e-15));
    }
    SECTION("top octave reaches about 125 samples (2.6 ms)") {
        bool near_125 = false;
        int shortest = 1 << 30;
        for (std::size_t i = 168; i < 192; ++i) {
            near_125 = near_125 || std::abs(plans[i].window_len - 125) <= 1;
            shortest = std::min(shortest, plans[i].window_len);
        }
        CHECK(near_125);
        CHECK(shortest <= 126);
        CHECK_THAT(plans.back().window_seconds() * 1e3, WithinAbs(2.6, 0.05));
    }
    SECTION("slowest bin is unsmoothed") {
        CHECK(plans.front().smoothing_time_constant == 0.0);
        CHECK(plans.back().smoothing_time_constant > 0.06);
    }
}

TEST_CASE("plan_bank is deterministic", "[planner]") {
    const NoteScaleConfig config;
    const auto a = plan_bank(config);
    const auto b = plan_bank(config);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::memcmp(&a[i].f_center_quantized, &b[i].f_center_quantized, sizeof(double)) == 0);
        CHECK(std::memcmp(&a[i].smoothing_time_constant, &b[i].smoothing_time_constant, sizeof(double)) == 0);
        CHECK(a[i].window_len == b[i].window_len);
        CHECK(a[i].half_periods == b[i].half_periods);
    }
}

TEST_CASE("plan_bank invariants hold over random feasible configurations", "[planner][property]") {
    std::mt19937 rng(20260317);
    std::uniform_int_distribution<int> bpo(6, 48), octaves(1, 8), note(12, 60);
    std::uniform_int_distribution<int> rate_pick(0, 3);
    std::uniform_real_distribution<double> window(0.02, 0.5), pitch(415.0, 466.0);
    const double rates[] = {22050.0, 44100.0, 48000.0, 96000.0};

    int planned = 0;
    for (int trial = 0; trial < 200; ++trial) {
        NoteScaleConfig c;
        c.bins_per_octave = bpo(rng);
        c.octaves = octaves(rng);
        c.lowest_note_midi = note(rng);
        c.sample_rate = rates[rate_pick(rng)];
        c.max_window_seconds = window(rng);
        c.reference_pitch = pitch(rng);
        std::vector<BinPlan> plans;
        try {
            plans = plan_bank(c);
        } catch (const std::invalid_argument&) {
            continue;
        }
        ++planned;
        check_bank_invariants(c, plans);
    }
    CHECK(planned > 50);
}

TEST_CASE("plan_bank rejects infeasible configurations", "[planner]") {
    NoteScaleConfig c;
    SECTION("top bin above Nyquist") {
        c.sample_rate = 8000.0;
        CHECK_THROWS_WITH(plan_bank(c), Catch::Matchers::ContainsSubstring("Nyquist"));
    }
    SECTION("too few half-periods") {
        c.bins_per_octave = 2;
        CHECK_THROWS_WITH(plan_bank(c), Catch::Matchers::ContainsSubstring("half-periods"));
    }
    SECTION("one bin per octave cannot meet the bandwidth precondition") {
        c.bins_per_octave = 1;
        CHECK_THROWS_AS(plan_bank(c), std::invalid_argument);
    }
    SECTION("window clamp too short for the top bins") {
        c.max_window_seconds = 0.0005;  // 24 samples
        CHECK_THROWS_AS(plan_bank(c), std::invalid_argument);
    }
    SECTION("config invariants") {
        NoteScaleConfig bad = c;
        bad.octaves = 0;
        CHECK_THROWS_AS(plan_bank(bad), std::invalid_argument);
        bad = c;
        bad.bins_per_octave = 0;
        CHECK_THROWS_AS(plan_bank(bad), std::invalid_argument);
        bad = c;
        bad.sample_rate = 0.0;
        CHECK_THROWS_AS(plan_bank(bad), std::invalid_argument);
        bad = c;
        bad.max_window_seconds = -1.0;
        CHECK_THROWS_AS(plan_bank(bad), std::invalid_argument);
    }
}
