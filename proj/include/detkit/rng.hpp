// Copyright 2026 the detkit authors
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

#include <cstdint>
#include <span>
#include <vector>

#include "detkit/errors.hpp"

namespace detkit {

/// SplitMix64 generator (Steele, Lea & Flood). Chosen over the <random>
/// engines because its output is fully specified, so simulation logs are
/// bit-reproducible across standard libraries. State is a single word,
/// which makes deriving an independent stream per round trivial.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Multiply-shift rejection-free map; bias is < 2^-53 for the small
        // n used here (setting counts, outcome counts).
        return static_cast<std::uint64_t>(next_double() * static_cast<double>(n));
    }

  private:
    std::uint64_t state_;
};

/// Mixes a base seed with a stream index into a fresh generator seed.
/// Streams for distinct indices are independent for practical purposes,
/// so per-round generators can be created in any order (or in parallel).
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    return g.next_u64();
}

/// Samples an index from an unnormalized nonnegative weight vector.
/// Entries that are exactly zero are never selected, so events of
/// probability zero cannot appear in simulation logs.
inline std::size_t sample_discrete(std::span<const double> weights, SplitMix64 &rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw NumericalError("sample_discrete: all weights are zero");
    const double u = rng.next_double() * total;
    double acc = 0.0;
    std::size_t last_positive = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last_positive = i;
        if (u < acc) return i;
    }
    return last_positive; // u landed on the accumulated rounding slack
}

} // namespace detkit
