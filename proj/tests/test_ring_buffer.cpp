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

#include <random>
#include <vector>

#include "ncdft/ring_buffer.hpp"

using ncdft::SharedRingBuffer;

TEST_CASE("push then read back", "[ring]") {
    SharedRingBuffer rb(100);
    rb.push(0);
    CHECK(rb.sample_at_lag(1) == 0);
    rb.push(32767);
    CHECK(rb.sample_at_lag(1) == 32767);
    rb.push(-32768);
    CHECK(rb.sample_at_lag(1) == -32768);
    CHECK(rb.sample_at_lag(2) == 32767);
    CHECK(rb.write_cursor() == 3);
}

TEST_CASE("wraparound keeps the last capacity samples", "[ring]") {
    for (std::size_t capacity : {1u, 7u, 64u, 100u, 6000u}) {
        SharedRingBuffer rb(capacity);
        for (std::size_t v = 1; v <= capacity + 5; ++v) rb.push(static_cast<std::int16_t>(v));
        CHECK(rb.sample_at_lag(capacity) == 6);
        CHECK(rb.sample_at_lag(1) == static_cast<std::int16_t>(capacity + 5));
    }
}

TEST_CASE("cold start reads zero", "[ring]") {
    SharedRingBuffer rb(100);
    CHECK(rb.sample_at_lag(100) == 0);
    rb.push(5);
    CHECK(rb.sample_at_lag(1) == 5);
    CHECK(rb.sample_at_lag(2) == 0);
    CHECK(rb.sample_at_lag(100) == 0);
}

TEST_CASE("lag outside [1, capacity] is rejected", "[ring]") {
    SharedRingBuffer rb(10);
    CHECK_THROWS_AS(rb.sample_at_lag(0), std::out_of_range);
    CHECK_THROWS_AS(rb.sample_at_lag(11), std::out_of_range);
    CHECK_NOTHROW(rb.sample_at_lag(10));
    CHECK_THROWS_AS(SharedRingBuffer(0), std::invalid_argument);
}

TEST_CASE("reset returns to the cold-start state", "[ring]") {
    SharedRingBuffer rb(16);
    for (int i = 0; i < 40; ++i) rb.push(static_cast<std::int16_t>(i + 1));
    rb.reset();
    CHECK(rb.write_cursor() == 0);
    for (std::size_t k = 1; k <= 16; ++k) CHECK(rb.sample_at_lag(k) == 0);
}

TEST_CASE("any push sequence reads back verbatim at every lag", "[ring][property]") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> value(-32768, 32767);
    std::uniform_int_distribution<std::size_t> cap(1, 3000), len(0, 10000);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t capacity = cap(rng);
        SharedRingBuffer rb(capacity);
        std::vector<std::int16_t> history;
        const std::size_t n = len(rng);
        for (std::size_t i = 0; i < n; ++i) {
            const auto v = static_cast<std::int16_t>(value(rng));
            history.push_back(v);
            rb.push(v);
        }
        for (std::size_t k = 1; k <= capacity; ++k) {
            const std::int16_t expected = k <= history.size() ? history[history.size() - k] : 0;
            REQUIRE(rb.sample_at_lag(k) == expected);
        }
    }
}
