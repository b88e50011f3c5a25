// Copyright 2026 The mpqkd Authors
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

#ifndef MPQKD_RNG_HPP
#define MPQKD_RNG_HPP

#include <cstdint>
#include <limits>

namespace mpqkd {

/// Who consumes a stream. The numeric value is part of the derivation.
enum class StreamId : std::uint64_t {
    kAlice = 1,
    kChannel = 2,  // Eve's live measurements
    kBob = 3,
    kEveDeferred = 4,
    kEstimation = 5,
};

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
   public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

   private:
    std::uint64_t state_;
};

/// Counter-based stream for (session seed, pulse index, consumer):
///   state = mix(mix(seed ^ mix(stream)) + index)
/// Independent of execution order, so serial and parallel runs agree.
inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t index, StreamId stream) {
    const std::uint64_t keyed = SplitMix64::mix(seed ^ SplitMix64::mix(static_cast<std::uint64_t>(stream)));
    return SplitMix64(SplitMix64::mix(keyed + index));
}

/// One fair coin from the top bit.
inline bool coin(SplitMix64 &rng) { return (rng() >> 63) != 0; }

inline constexpr const char *kStreamDerivation =
    "splitmix64; state = mix(mix(seed ^ mix(stream_id)) + pulse_index); stream ids: alice=1 channel=2 bob=3 "
    "eve_deferred=4 estimation=5 (index 0); coins use the top bit; Gaussian draws use std::normal_distribution";

}  // namespace mpqkd

#endif
