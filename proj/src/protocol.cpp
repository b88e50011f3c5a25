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

#include "mpqkd/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace mpqkd {

namespace {

struct PulseOutcome {
    PulseRecord alice;
    MeasurementRecord bob;
    std::optional<EveRecord> eve;
};

PulseOutcome simulate_pulse(std::uint64_t index, const SessionConfig &config, const Source &source,
                            QuantumMemory &memory) {
    auto alice_rng = derive_stream(config.seed, index, StreamId::kAlice);
    auto [record, state] = alice_prepare(index, source, alice_rng);

    auto eve_rng = derive_stream(config.seed, index, StreamId::kChannel);
    const auto &attack = config.attack;
    std::optional<EveRecord> eve;
    GaussianState delivered = state;
    switch (attack.kind) {
        case AttackKind::kNone:
            delivered = apply_loss(state, config.channel_loss);
            break;
        case AttackKind::kInterceptResend: {
            auto out = intercept_resend(index, state, eve_rng, source, attack.eve_detector);
            eve = out.record;
            delivered = apply_loss(out.forwarded, config.channel_loss);
            break;
        }
        case AttackKind::kBeamsplitterTap: {
            std::optional<Basis> known;
            if (attack.eve_knows_basis) known = record.alice_basis;
            auto out = beamsplitter_tap(index, state, *attack.tap_fraction, eve_rng, attack.eve_detector, known);
            eve = out.record;
            delivered = apply_loss(out.forwarded, config.channel_loss);
            break;
        }
        case AttackKind::kDualBasis: {
            auto out = dual_basis_measure(index, state, eve_rng, source, attack.eve_detector, attack.dual_basis_rule);
            eve = out.record;
            delivered = apply_loss(out.forwarded, config.channel_loss);
            break;
        }
        case AttackKind::kSuperiorChannel:
            // Eve's lossless line replaces the characterized channel.
            delivered = superior_channel(index, state, memory);
            break;
    }

    auto bob_rng = derive_stream(config.seed, index, StreamId::kBob);
    return {record, bob_measure(index, delivered, bob_rng, config), eve};
}

double fraction(std::uint64_t hits, std::uint64_t total) {
    return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

const char *to_string(Verdict v) { return v == Verdict::kClean ? "clean" : "eavesdropper_detected"; }

void SessionConfig::validate() const {
    std::vector<std::string> problems;
    try {
        source.validate();
    } catch (const std::invalid_argument &e) {
        problems.push_back(std::string("source: ") + e.what());
    }
    if (!(channel_loss >= 0.0 && channel_loss < 1.0)) problems.push_back("channel_loss must lie in [0, 1)");
    try {
        detector.validate();
    } catch (const std::invalid_argument &e) {
        problems.push_back(std::string("detector: ") + e.what());
    }
    attack.collect_problems(problems);
    if (num_pulses == 0) problems.push_back("num_pulses must be > 0");
    if (!(sample_fraction > 0.0 && sample_fraction < 1.0)) problems.push_back("sample_fraction must lie in (0, 1)");
    if (!(detection_sigma_k > 0.0) || !std::isfinite(detection_sigma_k)) {
        problems.push_back("detection_sigma_k must be > 0");
    }
    if (problems.empty()) return;
    std::ostringstream msg;
    msg << "invalid session config:";
    for (const auto &p : problems) msg << "\n  - " << p;
    throw ConfigError(msg.str());
}

std::pair<PulseRecord, GaussianState> alice_prepare(std::uint64_t index, const Source &source, SplitMix64 &rng) {
    PulseRecord rec;
    rec.index = index;
    rec.alice_bit = coin(rng) ? Bit::kOne : Bit::kZero;
    rec.alice_basis = coin(rng) ? Basis::kDiag : Basis::kVH;
    return {rec, source.pulse(rec.alice_bit, rec.alice_basis)};
}

std::pair<PulseRecord, GaussianState> alice_prepare(std::uint64_t index, const SessionConfig &config,
                                                    SplitMix64 &rng) {
    return alice_prepare(index, Source(config.source), rng);
}

MeasurementRecord bob_measure(std::uint64_t index, const GaussianState &state, SplitMix64 &rng,
                              const SessionConfig &config) {
    MeasurementRecord rec;
    rec.index = index;
    rec.bob_basis = coin(rng) ? Basis::kDiag : Basis::kVH;
    rec.raw_n = measure_difference(state, rec.bob_basis, config.detector, rng);
    rec.decoded_bit = decode_bit(rec.raw_n);
    return rec;
}

std::vector<std::uint64_t> sift(std::span<const PulseRecord> alice, std::span<const MeasurementRecord> bob) {
    if (alice.size() != bob.size()) throw std::invalid_argument("sift: Alice and Bob record counts differ");
    std::vector<std::uint64_t> kept;
    for (size_t i = 0; i < alice.size(); ++i) {
        if (alice[i].index != bob[i].index) {
            throw std::invalid_argument("sift: records misaligned at position " + std::to_string(i));
        }
        if (alice[i].alice_basis == bob[i].bob_basis) kept.push_back(i);
    }
    return kept;
}

ErrorEstimate estimate_error(std::span<const SiftedBit> sifted, double sample_fraction, SplitMix64 &rng) {
    if (sifted.empty()) throw std::invalid_argument("estimate_error: no sifted bits");
    if (!(sample_fraction > 0.0 && sample_fraction < 1.0)) {
        throw std::invalid_argument("estimate_error: sample_fraction must lie in (0, 1)");
    }
    const auto n = sifted.size();
    const auto k = static_cast<size_t>(std::llround(sample_fraction * static_cast<double>(n)));
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> sampled(n, false);
    std::uint64_t errors = 0;
    for (size_t j = 0; j < k; ++j) {
        sampled[order[j]] = true;
        if (sifted[order[j]].alice != sifted[order[j]].bob) ++errors;
    }
    ErrorEstimate out;
    out.sampled_count = k;
    out.error_rate = fraction(errors, k);
    out.remaining_key.reserve(n - k);
    for (size_t i = 0; i < n; ++i) {
        if (!sampled[i]) out.remaining_key.push_back(sifted[i]);
    }
    return out;
}

Detection detect_eavesdropping(double estimated_error_rate, std::uint64_t sampled_count, const SessionConfig &config) {
    if (sampled_count == 0) throw std::invalid_argument("detect_eavesdropping: nothing was sampled");
    Detection d;
    d.systematic_error = bob_error_vs_loss(config.source, config.channel_loss, config.detector);
    const double e = d.systematic_error;
    d.threshold = e + config.detection_sigma_k * std::sqrt(e * (1.0 - e) / static_cast<double>(sampled_count));
    d.verdict = estimated_error_rate > d.threshold ? Verdict::kEavesdropperDetected : Verdict::kClean;
    return d;
}

SessionTrace run_session_trace(const SessionConfig &config, ExecutionOptions exec) {
    config.validate();
    const Source source(config.source);
    const auto n = config.num_pulses;
    QuantumMemory memory;

    SessionTrace trace;
    trace.alice.resize(n);
    trace.bob.resize(n);
    trace.eve.resize(n);

    const unsigned workers = std::max(1u, std::min<unsigned>(exec.threads, static_cast<unsigned>(std::min<std::uint64_t>(n, 1024))));
    std::vector<std::optional<std::pair<std::uint64_t, std::string>>> failures(workers);
    auto run_chunk = [&](unsigned w) {
        const std::uint64_t begin = n * w / workers;
        const std::uint64_t end = n * (w + 1) / workers;
        for (std::uint64_t i = begin; i < end; ++i) {
            try {
                auto out = simulate_pulse(i, config, source, memory);
                trace.alice[i] = out.alice;
                trace.bob[i] = out.bob;
                trace.eve[i] = std::move(out.eve);
            } catch (const std::exception &e) {
                failures[w] = std::make_pair(i, std::string(e.what()));
                return;
            }
        }
    };
    if (workers == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_chunk, w);
        for (auto &t : pool) t.join();
    }
    for (const auto &f : failures) {
        // Chunks are in index order, so the first failure found is the lowest index.
        if (f) throw std::runtime_error("pulse " + std::to_string(f->first) + ": " + f->second);
    }

    trace.sifted_positions = sift(trace.alice, trace.bob);
    const auto &kept = trace.sifted_positions;
    if (kept.empty()) throw ConfigError("invalid session config:\n  - no sifted bits; increase num_pulses");

    if (config.attack.kind == AttackKind::kSuperiorChannel) {
        std::vector<RevealedBasis> revealed;
        revealed.reserve(kept.size());
        for (auto pos : kept) revealed.push_back({trace.alice[pos].index, trace.alice[pos].alice_basis});
        auto records = eve_deferred_measure(memory, revealed, config.seed, config.attack.eve_detector);
        for (size_t j = 0; j < kept.size(); ++j) trace.eve[kept[j]] = records[j];
    }

    std::vector<SiftedBit> sifted;
    sifted.reserve(kept.size());
    std::uint64_t bob_errors = 0, eve_bits = 0, eve_bases = 0, eve_arm = 0, eve_seen = 0;
    for (auto pos : kept) {
        const auto &a = trace.alice[pos];
        const auto &b = trace.bob[pos];
        sifted.push_back({a.index, a.alice_bit, b.decoded_bit});
        if (a.alice_bit != b.decoded_bit) ++bob_errors;
        if (const auto &e = trace.eve[pos]) {
            ++eve_seen;
            if (e->inferred_bit == a.alice_bit) ++eve_bits;
            if (e->basis == a.alice_basis) ++eve_bases;
            if (e->both_bases) {
                if (auto raw = e->raw_in(a.alice_basis); raw && decode_bit(*raw) == a.alice_bit) ++eve_arm;
            }
        }
    }

    const std::uint64_t expected_sample =
        static_cast<std::uint64_t>(std::llround(config.sample_fraction * static_cast<double>(sifted.size())));
    if (expected_sample == 0) {
        throw ConfigError("invalid session config:\n  - sample_fraction * sifted_count rounds to 0; nothing to compare");
    }
    auto estimation_rng = derive_stream(config.seed, 0, StreamId::kEstimation);
    const auto estimate = estimate_error(sifted, config.sample_fraction, estimation_rng);
    const auto detection = detect_eavesdropping(estimate.error_rate, estimate.sampled_count, config);

    RunReport &r = trace.report;
    r.pulses_sent = n;
    r.sifted_count = sifted.size();
    r.sampled_count = estimate.sampled_count;
    r.final_key_bits = estimate.remaining_key.size();
    r.estimated_error_rate = estimate.error_rate;
    r.sifted_error_rate = fraction(bob_errors, sifted.size());
    r.bob_bit_accuracy = 1.0 - r.sifted_error_rate;
    r.expected_systematic_error = detection.systematic_error;
    r.detection_threshold = detection.threshold;
    r.detection_verdict = detection.verdict;
    r.attack = config.attack.kind;
    if (config.attack.kind != AttackKind::kNone) {
        r.eve_bit_accuracy = fraction(eve_bits, eve_seen);
        r.eve_basis_accuracy = fraction(eve_bases, eve_seen);
        if (config.attack.kind == AttackKind::kDualBasis) r.eve_correct_arm_accuracy = fraction(eve_arm, eve_seen);
    }
    return trace;
}

RunReport run_session(const SessionConfig &config, ExecutionOptions exec) {
    return run_session_trace(config, exec).report;
}

}  // namespace mpqkd
