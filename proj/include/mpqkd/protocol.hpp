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

#ifndef MPQKD_PROTOCOL_HPP
#define MPQKD_PROTOCOL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpqkd/attacks.hpp"
#include "mpqkd/gaussian_state.hpp"
#include "mpqkd/photostats.hpp"
#include "mpqkd/rng.hpp"

namespace mpqkd {

/// Invalid session configuration. what() lists every offending field.
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

struct PulseRecord {
    std::uint64_t index = 0;
    Bit alice_bit = Bit::kOne;
    Basis alice_basis = Basis::kVH;
};

struct MeasurementRecord {
    std::uint64_t index = 0;
    Basis bob_basis = Basis::kVH;
    double raw_n = 0;
    Bit decoded_bit = Bit::kOne;  // 1 iff raw_n >= 0
};

struct SessionConfig {
    SourceParams source;
    double channel_loss = 0.0;  // in [0, 1)
    DetectorModel detector;
    AttackConfig attack;
    std::uint64_t num_pulses = 100000;
    double sample_fraction = 0.1;
    double detection_sigma_k = 5.0;
    std::uint64_t seed = 42;

    /// Throws ConfigError naming every invalid field.
    void validate() const;
};

enum class Verdict : std::uint8_t { kClean, kEavesdropperDetected };
const char *to_string(Verdict v);

struct RunReport {
    std::uint64_t pulses_sent = 0;
    std::uint64_t sifted_count = 0;
    std::uint64_t sampled_count = 0;
    std::uint64_t final_key_bits = 0;
    /// Error rate on the publicly compared sample.
    double estimated_error_rate = 0;
    /// Error rate over every sifted bit, against Alice's ground truth.
    double sifted_error_rate = 0;
    double bob_bit_accuracy = 0;
    /// Characterized rate for the channel loss, from the closed form.
    double expected_systematic_error = 0;
    double detection_threshold = 0;
    Verdict detection_verdict = Verdict::kClean;
    AttackKind attack = AttackKind::kNone;
    /// Fraction of sifted pulses where Eve's inferred bit equals Alice's.
    std::optional<double> eve_bit_accuracy;
    /// Fraction of sifted pulses where Eve's (measured or inferred) basis matched.
    std::optional<double> eve_basis_accuracy;
    /// Dual-basis only: bit accuracy of the arm measured in Alice's basis.
    std::optional<double> eve_correct_arm_accuracy;
};

struct SiftedBit {
    std::uint64_t index = 0;
    Bit alice = Bit::kOne;
    Bit bob = Bit::kOne;
};

struct ErrorEstimate {
    double error_rate = 0;
    std::uint64_t sampled_count = 0;
    std::vector<SiftedBit> remaining_key;
};

struct Detection {
    Verdict verdict = Verdict::kClean;
    double systematic_error = 0;
    double threshold = 0;
};

struct ExecutionOptions {
    unsigned threads = 1;
};

/// Everything a session produced, in pulse order.
struct SessionTrace {
    std::vector<PulseRecord> alice;
    std::vector<MeasurementRecord> bob;
    std::vector<std::optional<EveRecord>> eve;
    std::vector<std::uint64_t> sifted_positions;
    RunReport report;
};

std::pair<PulseRecord, GaussianState> alice_prepare(std::uint64_t index, const Source &source, SplitMix64 &rng);
std::pair<PulseRecord, GaussianState> alice_prepare(std::uint64_t index, const SessionConfig &config, SplitMix64 &rng);

/// Random basis, detector efficiency as loss, Gaussian outcome with read noise.
MeasurementRecord bob_measure(std::uint64_t index, const GaussianState &state, SplitMix64 &rng,
                              const SessionConfig &config);

/// Positions where Alice's and Bob's bases agree. Throws std::invalid_argument
/// on length or index mismatch.
std::vector<std::uint64_t> sift(std::span<const PulseRecord> alice, std::span<const MeasurementRecord> bob);

/// Publicly compares round(sample_fraction * n) bits chosen without
/// replacement and drops them from the key. Throws on an empty key.
ErrorEstimate estimate_error(std::span<const SiftedBit> sifted, double sample_fraction, SplitMix64 &rng);

/// eavesdropper_detected iff rate > e_sys + k sqrt(e_sys (1 - e_sys) / sampled).
Detection detect_eavesdropping(double estimated_error_rate, std::uint64_t sampled_count, const SessionConfig &config);

SessionTrace run_session_trace(const SessionConfig &config, ExecutionOptions exec = {});
RunReport run_session(const SessionConfig &config, ExecutionOptions exec = {});

}  // namespace mpqkd

#endif
