// Copyright 2026 The qsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

namespace qsplit {

/// Counter-based generator: output i of stream (seed, path) is a pure
/// function of (seed, path, i). split() derives child streams, so
/// per-client draws do not depend on how many other clients exist or in
/// which order they run. Distribution helpers are implemented here rather
/// than with <random> distributions, whose outputs are
/// implementation-defined.
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc908ULL)) {}

    Rng split(std::uint64_t stream) const { return Rng(key_, mix(key_ ^ mix(stream + 0x9e3779b97f4a7c15ULL))); }
    Rng split(std::string_view label) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : label) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
        return split(h);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return mix(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double angle() { return uniform(-std::numbers::pi, std::numbers::pi); }

    /// Uniform integer in [0, n), n > 0 (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t n) {
        for (;;) {
            std::uint64_t high = 0;
            const std::uint64_t low = mul128((*this)(), n, high);
            if (low >= n || low >= (0 - n) % n) return high;
        }
    }

    std::uint64_t counter() const { return counter_; }

  private:
    Rng(std::uint64_t /*parent*/, std::uint64_t key) : key_(key) {}

    static constexpr std::uint64_t mul128(std::uint64_t a, std::uint64_t b, std::uint64_t &high) {
        const std::uint64_t a_lo = a & 0xffffffffULL, a_hi = a >> 32;
        const std::uint64_t b_lo = b & 0xffffffffULL, b_hi = b >> 32;
        const std::uint64_t ll = a_lo * b_lo, lh = a_lo * b_hi, hl = a_hi * b_lo, hh = a_hi * b_hi;
        const std::uint64_t mid = (ll >> 32) + (lh & 0xffffffffULL) + (hl & 0xffffffffULL);
        high = hh + (lh >> 32) + (hl >> 32) + (mid >> 32);
        return (mid << 32) | (ll & 0xffffffffULL);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace qsplit
