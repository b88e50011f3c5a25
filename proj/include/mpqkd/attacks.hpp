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

// Eavesdropper models. Each interceptor sits between Alice's source and the
// characterized channel and logs what Eve inferred so sessions can score her
// against ground truth.

#ifndef MPQKD_ATTACKS_HPP
#define MPQKD_ATTACKS_HPP

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpqkd/gaussian_state.hpp"
#include "mpqkd/photostats.hpp"
#include "mpqkd/rng.hpp"

namespace mpqkd {

enum class AttackKind : std::uint8_t { kNone, kInterceptResend, kBeamsplitterTap, kDualBasis, kSuperiorChannel };

/// How the dual-basis attacker decides which arm carried the signal.
enum class DualBasisRule : std::uint8_t {
    kNormalizedMagnitude,  // larger |raw| / sigma_correct, ties to VH
    kLikelihoodRatio,      // Gaussian-mixture likelihood ratio, ties to VH
};

const char *to_string(AttackKind kind);
AttackKind parse_attack_kind(const std::string &name);
const char *to_string(DualBasisRule rule);
DualBasisRule parse_dual_basis_rule(const std::string &name);

struct AttackConfig {
    AttackKind kind = AttackKind::kNone;
    /// Fraction Eve samples; only meaningful for kBeamsplitterTap.
    std::optional<double> tap_fraction;
    DetectorModel eve_detector = DetectorModel::noiseless();
    /// Diagnostic: the tapping Eve is told Alice's basis.
    bool eve_knows_basis = false;
    DualBasisRule dual_basis_rule = DualBasisRule::kNormalizedMagnitude;

    /// Appends problems to `problems`.
    void collect_problems(std::vector<std::string> &problems) const;
};

struct EveRecord {
    std::uint64_t index = 0;
    /// Basis Eve measured in, or (dual-basis) the basis she inferred.
    Basis basis = Basis::kVH;
    bool both_bases = false;
    std::optional<double> raw_vh;
    std::optional<double> raw_diag;
    Bit inferred_bit = Bit::kOne;
    bool deferred = false;

    std::optional<double> raw_in(Basis b) const { return b == Basis::kVH ? raw_vh : raw_diag; }
};

struct Interception {
    GaussianState forwarded;
    EveRecord record;
};

/// Eve's quantum memory for the superior-channel attack: an append-only map
/// from pulse index to her stored two-mode marginal. Safe for concurrent
/// stores to distinct indices.
class QuantumMemory {
   public:
    void store(std::uint64_t index, GaussianState state);
    std::optional<GaussianState> find(std::uint64_t index) const;
    size_t size() const;

   private:
    mutable std::mutex mu_;
    std::map<std::uint64_t, GaussianState> pulses_;
};

/// Sign-decoded measurement of n in `basis` (ties decode as 1).
double measure_difference(const GaussianState &state, Basis basis, const DetectorModel &detector, SplitMix64 &rng);
Bit decode_bit(double raw_n);

/// Attack one: full capture, random basis, perfect re-preparation.
Interception intercept_resend(std::uint64_t index, const GaussianState &state, SplitMix64 &rng, const Source &source,
                              const DetectorModel &eve_detector);

/// Attack two: Eve keeps fraction eta_e and measures it; the rest goes on.
/// With `known_basis` set she measures in that basis instead of guessing.
Interception beamsplitter_tap(std::uint64_t index, const GaussianState &state, double eta_e, SplitMix64 &rng,
                              const DetectorModel &eve_detector, std::optional<Basis> known_basis = std::nullopt);

/// Attack three: 50/50 split, one arm in each basis, re-prepare the guess.
Interception dual_basis_measure(std::uint64_t index, const GaussianState &state, SplitMix64 &rng, const Source &source,
                                const DetectorModel &eve_detector,
                                DualBasisRule rule = DualBasisRule::kNormalizedMagnitude);

/// Attack four: 50/50 split; Eve stores her half and forwards the other over
/// her lossless channel. Returns Bob's state.
GaussianState superior_channel(std::uint64_t index, const GaussianState &state, QuantumMemory &store);

struct RevealedBasis {
    std::uint64_t index = 0;
    Basis basis = Basis::kVH;
};

/// Measures each stored pulse in its revealed basis, after sifting. Throws
/// std::out_of_range for an index with no stored pulse.
std::vector<EveRecord> eve_deferred_measure(const QuantumMemory &store, std::span<const RevealedBasis> revealed,
                                            std::uint64_t seed, const DetectorModel &eve_detector);

}  // namespace mpqkd

#endif
