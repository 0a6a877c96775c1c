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

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ncdft {

/**
 * Circular store of 16-bit samples shared by every bin of a bank.
 *
 * Each bin looks back by its own window length to find the sample leaving its
 * window. Samples are stored verbatim; slots that were never written read as
 * zero. Single writer, no internal synchronization.
 */
class SharedRingBuffer {
public:
    explicit SharedRingBuffer(std::size_t capacity)
        : capacity_(capacity), storage_(std::bit_ceil(std::max<std::size_t>(capacity, 1))),
          mask_(storage_.size() - 1) {
        if (capacity == 0) throw std::invalid_argument("SharedRingBuffer: capacity must be positive");
    }

    std::size_t capacity() const { return capacity_; }

    /// Total number of samples pushed since construction or the last reset().
    std::uint64_t write_cursor() const { return cursor_; }

    void push(std::int16_t sample) {
        storage_[cursor_ & mask_] = sample;
        ++cursor_;
    }

    /// Sample pushed @p lag pushes ago (1 = most recent); 0 before it existed.
    std::int16_t sample_at_lag(std::size_t lag) const {
        if (lag < 1 || lag > capacity_)
            throw std::out_of_range("SharedRingBuffer: lag outside [1, capacity]");
        return at_lag(lag);
    }

    /// Unchecked variant for the engine's inner loop; 1 <= lag <= capacity().
    std::int16_t at_lag(std::size_t lag) const { return storage_[(cursor_ - lag) & mask_]; }

    void reset() {
        std::fill(storage_.begin(), storage_.end(), std::int16_t{0});
        cursor_ = 0;
    }

private:
    std::size_t capacity_;
    std::vector<std::int16_t> storage_;
    std::uint64_t mask_;
    std::uint64_t cursor_ = 0;
};

}  // namespace ncdft
