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

#include "mpqkd/attacks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mpqkd {

namespace {

constexpr std::array<size_t, 2> kBobModes = {0, 1};
constexpr std::array<size_t, 2> kEveModes = {2, 3};

GaussianState relabeled_vh(const GaussianState &s) { return GaussianState({"V", "H"}, s.mean(), s.cov()); }

double log_normal_pdf(double x, double mean, double var) {
    const double z = x - mean;
    return -0.5 * z * z / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
}

double log_add(double a, double b) {
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

const char *to_string(AttackKind kind) {
    switch (kind) {
        case AttackKind::kNone:
            return "none";
        case AttackKind::kInterceptResend:
            return "intercept_resend";
        case AttackKind::kBeamsplitterTap:
            return "beamsplitter_tap";
        case AttackKind::kDualBasis:
            return "dual_basis";
        case AttackKind::kSuperiorChannel:
            return "superior_channel";
    }
    return "?";
}

AttackKind parse_attack_kind(const std::string &name) {
    for (auto k : {AttackKind::kNone, AttackKind::kInterceptResend, AttackKind::kBeamsplitterTap,
                   AttackKind::kDualBasis, AttackKind::kSuperiorChannel}) {
        if (name == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown attack '" + name + "'");
}

const char *to_string(DualBasisRule rule) {
    return rule == DualBasisRule::kNormalizedMagnitude ? "normalized_magnitude" : "likelihood_ratio";
}

DualBasisRule parse_dual_basis_rule(const std::string &name) {
    if (name == "normalized_magnitude") return DualBasisRule::kNormalizedMagnitude;
    if (name == "likelihood_ratio") return DualBasisRule::kLikelihoodRatio;
    throw std::invalid_argument("unknown dual-basis rule '" + name + "'");
}

void AttackConfig::collect_problems(std::vector<std::string> &problems) const {
    if (kind == AttackKind::kBeamsplitterTap) {
        if (!tap_fraction) {
            problems.push_back("attack.tap_fraction is required for beamsplitter_tap");
        } else if (!(*tap_fraction > 0.0 && *tap_fraction < 1.0)) {
            problems.push_back("attack.tap_fraction must lie in (0, 1)");
        }
    } else if (tap_fraction) {
        problems.push_back("attack.tap_fraction is only valid for beamsplitter_tap");
    }
    try {
        eve_detector.validate();
    } catch (const std::invalid_argument &e) {
        problems.push_back(std::string("attack.eve_detector: ") + e.what());
    }
}

void QuantumMemory::store(std::uint64_t index, GaussianState state) {
    std::lock_guard lock(mu_);
    if (!pulses_.emplace(index, std::move(state)).second) {
        throw std::logic_error("QuantumMemory: pulse " + std::to_string(index) + " stored twice");
    }
}

std::optional<GaussianState> QuantumMemory::find(std::uint64_t index) const {
    std::lock_guard lock(mu_);
    auto it = pulses_.find(index);
    if (it == pulses_.end()) return std::nullopt;
    return it->second;
}

size_t QuantumMemory::size() const {
    std::lock_guard lock(mu_);
    return pulses_.size();
}

Bit decode_bit(double raw_n) { return raw_n >= 0.0 ? Bit::kOne : Bit::kZero; }

double measure_difference(const GaussianState &state, Basis basis, const DetectorModel &detector, SplitMix64 &rng) {
    auto effective = detector.quantum_efficiency < 1.0 ? apply_loss(state, 1.0 - detector.quantum_efficiency) : state;
    return sample_outcome(diff_number_moments(effective, basis), detector, rng);
}

Interception intercept_resend(std::uint64_t index, const GaussianState &state, SplitMix64 &rng, const Source &source,
                              const DetectorModel &eve_detector) {
    EveRecord rec;
    rec.index = index;
    rec.basis = coin(rng) ? Basis::kDiag : Basis::kVH;
    const double raw = measure_difference(state, rec.basis, eve_detector, rng);
    (rec.basis == Basis::kVH ? rec.raw_vh : rec.raw_diag) = raw;
    rec.inferred_bit = decode_bit(raw);
    return {source.pulse(rec.inferred_bit, rec.basis), rec};
}

Interception beamsplitter_tap(std::uint64_t index, const GaussianState &state, double eta_e, SplitMix64 &rng,
                              const DetectorModel &eve_detector, std::optional<Basis> known_basis) {
    const auto joint = tap_split(state, eta_e);
    EveRecord rec;
    rec.index = index;
    // Draw the basis coin even when it is overridden so the stream layout stays fixed.
    const Basis guess = coin(rng) ? Basis::kDiag : Basis::kVH;
    rec.basis = known_basis.value_or(guess);
    const double raw = measure_difference(relabeled_vh(joint.marginal(kEveModes)), rec.basis, eve_detector, rng);
    (rec.basis == Basis::kVH ? rec.raw_vh : rec.raw_diag) = raw;
    rec.inferred_bit = decode_bit(raw);
    return {relabeled_vh(joint.marginal(kBobModes)), rec};
}

Interception dual_basis_measure(std::uint64_t index, const GaussianState &state, SplitMix64 &rng, const Source &source,
                                const DetectorModel &eve_detector, DualBasisRule rule) {
    const auto lossless = eve_detector.quantum_efficiency < 1.0
                              ? apply_loss(state, 1.0 - eve_detector.quantum_efficiency)
                              : state;
    // Arm B measured in VH, arm E in DIAG; the two outcomes are drawn jointly.
    const auto joint = joint_diff_moments(tap_split(lossless, 0.5), Basis::kVH, Basis::kDiag);
    const double noise = eve_detector.difference_noise_variance();
    const double sd_vh = std::sqrt(joint.bob.variance + noise);
    const double sd_diag = std::sqrt(joint.eve.variance + noise);
    const double rho = (sd_vh > 0 && sd_diag > 0) ? joint.covariance / (sd_vh * sd_diag) : 0.0;
    std::normal_distribution<double> unit(0.0, 1.0);
    const double z1 = unit(rng);
    const double z2 = unit(rng);
    const double raw_vh = joint.bob.mean + sd_vh * z1;
    const double raw_diag = joint.eve.mean + sd_diag * (rho * z1 + std::sqrt(std::max(0.0, 1.0 - rho * rho)) * z2);

    // Eve's model of an arm in the right and in the wrong basis.
    const auto half = apply_loss(source.pulse(Bit::kOne, Basis::kVH), 0.5 + 0.5 * (1.0 - eve_detector.quantum_efficiency));
    const auto right = diff_number_moments(half, Basis::kVH);
    const auto wrong = diff_number_moments(half, Basis::kDiag);
    const double var_right = right.variance + noise;
    const double var_wrong = wrong.variance + noise;

    Basis chosen = Basis::kVH;
    if (rule == DualBasisRule::kNormalizedMagnitude) {
        const double sd = std::sqrt(var_right);
        chosen = std::abs(raw_diag) / sd > std::abs(raw_vh) / sd ? Basis::kDiag : Basis::kVH;
    } else {
        auto log_signal = [&](double x) {
            return log_add(log_normal_pdf(x, right.mean, var_right), log_normal_pdf(x, -right.mean, var_right));
        };
        const double vh_is_right = log_signal(raw_vh) + log_normal_pdf(raw_diag, 0.0, var_wrong);
        const double diag_is_right = log_signal(raw_diag) + log_normal_pdf(raw_vh, 0.0, var_wrong);
        chosen = diag_is_right > vh_is_right ? Basis::kDiag : Basis::kVH;
    }

    EveRecord rec;
    rec.index = index;
    rec.basis = chosen;
    rec.both_bases = true;
    rec.raw_vh = raw_vh;
    rec.raw_diag = raw_diag;
    rec.inferred_bit = decode_bit(chosen == Basis::kVH ? raw_vh : raw_diag);
    return {source.pulse(rec.inferred_bit, chosen), rec};
}

GaussianState superior_channel(std::uint64_t index, const GaussianState &state, QuantumMemory &store) {
    const auto joint = tap_split(state, 0.5);
    store.store(index, relabeled_vh(joint.marginal(kEveModes)));
    return relabeled_vh(joint.marginal(kBobModes));
}

std::vector<EveRecord> eve_deferred_measure(const QuantumMemory &store, std::span<const RevealedBasis> revealed,
                                            std::uint64_t seed, const DetectorModel &eve_detector) {
    std::vector<EveRecord> out;
    out.reserve(revealed.size());
    for (const auto &r : revealed) {
        auto stored = store.find(r.index);
        if (!stored) throw std::out_of_range("eve_deferred_measure: no stored pulse for index " + std::to_string(r.index));
        auto rng = derive_stream(seed, r.index, StreamId::kEveDeferred);
        EveRecord rec;
        rec.index = r.index;
        rec.basis = r.basis;
        rec.deferred = true;
        const double raw = measure_difference(*stored, r.basis, eve_detector, rng);
        (r.basis == Basis::kVH ? rec.raw_vh : rec.raw_diag) = raw;
        rec.inferred_bit = decode_bit(raw);
        out.push_back(rec);
    }
    return out;
}

}  // namespace mpqkd
