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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Each criterion also has a wall-clock budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mpqkd/harness.hpp"
#include "mpqkd/photostats.hpp"
#include "mpqkd/protocol.hpp"
#include "mpqkd/validation.hpp"

using namespace mpqkd;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char *name;
    double budget_seconds;
    std::function<Outcome()> check;
};

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
double binomial_se(double p, double n) { return std::sqrt(p * (1 - p) / n); }

unsigned worker_count() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

// The serial/parallel comparison always uses several workers, even on one core.
unsigned parallel_workers() { return std::max(4u, worker_count()); }

Outcome shot_noise_reduction() {
    const SourceParams p;
    const auto m = diff_number_moments(alice_source(p, Bit::kOne, Basis::kVH), Basis::kVH);
    const double target = p.n_total_amp / p.gain;
    const double err = rel(m.variance, target);
    return {err <= 1e-9, fmt("var(n) = %.10g, target %.10g, rel err %.2e (tol 1e-9)", m.variance, target, err)};
}

Outcome oracle_gate() {
    const auto result = run_validation();
    double worst = 0;
    int errors = 0;
    for (const auto &row : result.rows) {
        worst = std::max(worst, row.rel_error);
        errors += !row.error.empty();
    }
    return {result.all_passed(), fmt("%zu/%zu comparisons within 1e-6, worst rel err %.2e, %d oracle errors",
                                     result.rows.size() - result.failures(), result.rows.size(), worst, errors)};
}

Outcome baseline_error_rate() {
    const double p = bob_error_vs_loss(SourceParams{}, 0.0, DetectorModel::noiseless());
    const double err = rel(p, 1.93e-8);
    return {err <= 0.02, fmt("P_err(0) = %.6e, target 1.93e-8 +/- 2%%, rel err %.2f%%", p, 100 * err)};
}

Outcome loss_curve() {
    const SourceParams p;
    const auto quiet = DetectorModel::noiseless();
    bool increasing = true;
    double prev = bob_error_vs_loss(p, 0.0, quiet);
    for (int i = 1; i <= 900; ++i) {
        const double cur = bob_error_vs_loss(p, i / 1000.0, quiet);
        increasing = increasing && cur > prev;
        prev = cur;
    }
    const double half = bob_error_vs_loss(p, 0.5, quiet);
    const bool anchor = rel(half, 4.86e-2) <= 0.02;

    SessionConfig c;
    c.channel_loss = 0.5;
    c.detector = quiet;
    c.num_pulses = 100000;
    const auto r = run_session(c, {worker_count()});
    const double se = binomial_se(half, static_cast<double>(r.sifted_count));
    const double z = std::abs(r.sifted_error_rate - half) / se;
    return {increasing && anchor && z < 5.0,
            fmt("strictly increasing: %s; P_err(0.5) = %.6f (target 0.0486 +/- 2%%); Monte Carlo %.6f over %llu "
                "sifted bits, %.2f standard errors",
                increasing ? "yes" : "no", half, r.sifted_error_rate,
                static_cast<unsigned long long>(r.sifted_count), z)};
}

Outcome tap_curve() {
    const SourceParams p;
    const double zero = eve_tap_probability(p, 0.0);
    const double half = eve_tap_probability(p, 0.5);
    return {zero == 0.5 && std::abs(half - 0.951) <= 0.005,
            fmt("P_eta(0) = %.17g (exact 0.5); P_eta(0.5) = %.6f (target 0.951 +/- 0.005)", zero, half)};
}

Outcome intercept_resend_attack() {
    SessionConfig c;
    c.num_pulses = 210000;
    c.attack.kind = AttackKind::kInterceptResend;
    const auto r = run_session(c, {worker_count()});
    const bool enough = r.sifted_count >= 100000;
    const bool rate = std::abs(r.sifted_error_rate - 0.25) <= 0.01;
    const bool detected = r.detection_verdict == Verdict::kEavesdropperDetected;
    return {enough && rate && detected,
            fmt("sifted error %.5f over %llu sifted bits (target 0.25 +/- 0.01, >= 1e5 bits); verdict %s",
                r.sifted_error_rate, static_cast<unsigned long long>(r.sifted_count), to_string(r.detection_verdict))};
}

Outcome dual_basis_attack() {
    SessionConfig c;
    c.num_pulses = 100000;
    c.attack.kind = AttackKind::kDualBasis;
    const auto r = run_session(c, {worker_count()});
    const double arm = r.eve_correct_arm_accuracy.value_or(0);
    const double basis = r.eve_basis_accuracy.value_or(0);
    const bool arm_ok = std::abs(arm - 0.951) <= 0.01;
    const bool basis_ok = basis >= 0.45 && basis <= 0.60;
    const bool elevated = r.sifted_error_rate > r.detection_threshold;
    const bool detected = r.detection_verdict == Verdict::kEavesdropperDetected;

    auto lr = c;
    lr.attack.dual_basis_rule = DualBasisRule::kLikelihoodRatio;
    const auto r_lr = run_session(lr, {worker_count()});
    return {arm_ok && basis_ok && elevated && detected,
            fmt("correct-arm accuracy %.4f (target 0.951 +/- 0.01); basis accuracy %.4f (target [0.45, 0.60]; "
                "likelihood-ratio rule: %.4f); Bob error %.4f vs systematic %.3g; verdict %s",
                arm, basis, r_lr.eve_basis_accuracy.value_or(0), r.sifted_error_rate, r.expected_systematic_error,
                to_string(r.detection_verdict))};
}

Outcome superior_channel_attack() {
    SessionConfig c;
    c.num_pulses = 100000;
    c.channel_loss = 0.5;
    // Same detector class on both sides, so equal optics means equal information.
    c.detector = DetectorModel::noiseless();
    c.attack.kind = AttackKind::kSuperiorChannel;
    const auto r = run_session(c, {worker_count()});
    const double eve = r.eve_bit_accuracy.value_or(0);
    const double bob = r.bob_bit_accuracy;
    const double n = static_cast<double>(r.sifted_count);
    const double se = std::sqrt(binomial_se(eve, n) * binomial_se(eve, n) + binomial_se(bob, n) * binomial_se(bob, n));
    const double z = std::abs(eve - bob) / se;
    const bool clean = r.detection_verdict == Verdict::kClean;
    return {z < 5.0 && clean, fmt("Eve %.5f, Bob %.5f, difference %.2f combined standard errors (limit 5); verdict %s",
                                  eve, bob, z, to_string(r.detection_verdict))};
}

Outcome wrong_basis_variance() {
    std::mt19937_64 rng(20260101);
    std::uniform_real_distribution<double> gain(1.0 + 1e-6, 30.0);
    std::uniform_real_distribution<double> log_total(std::log(1e3), std::log(1e8));
    std::uniform_real_distribution<double> frac(1e-4, 0.9);
    int ok = 0;
    for (int i = 0; i < 200; ++i) {
        SourceParams p;
        p.gain = gain(rng);
        p.n_total_amp = std::exp(log_total(rng));
        p.bit_amplitude = frac(rng) * p.seed_total();
        const Basis b = i % 2 ? Basis::kDiag : Basis::kVH;
        const auto s = alice_source(p, i % 4 < 2 ? Bit::kOne : Bit::kZero, b);
        const double right = diff_number_moments(s, b).variance;
        const double wrong = diff_number_moments(s, other(b)).variance;
        ok += wrong > p.n_total_amp && p.n_total_amp > right;
    }
    return {ok == 200, fmt("%d/200 random sources satisfy var_wrong > N_T > var_right", ok)};
}

Outcome determinism() {
    SessionConfig c;
    c.num_pulses = 100000;
    c.attack.kind = AttackKind::kSuperiorChannel;
    const auto first = run_report_document(c, run_session(c, {1}));
    const auto second = run_report_document(c, run_session(c, {1}));
    const auto parallel = run_report_document(c, run_session(c, {parallel_workers()}));
    const bool same = first == second;
    const bool agree = first == parallel;
    return {same && agree, fmt("repeat run byte-identical: %s; serial vs %u threads identical: %s (%zu bytes)",
                               same ? "yes" : "no", parallel_workers(), agree ? "yes" : "no", first.size())};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "shot-noise reduction of the amplified pulse", 1, shot_noise_reduction},
        {2, "Gaussian engine agrees with the Fock oracle", 60, oracle_gate},
        {3, "baseline error rate", 1, baseline_error_rate},
        {4, "error rate versus loss", 30, loss_curve},
        {5, "tap inference probability", 1, tap_curve},
        {6, "intercept-resend attack", 60, intercept_resend_attack},
        {7, "dual-basis attack", 60, dual_basis_attack},
        {8, "superior-channel attack", 60, superior_channel_attack},
        {9, "wrong-basis variance exceeds shot noise", 10, wrong_basis_variance},
        {10, "determinism", 30, determinism},
    };
    int failures = 0;
    for (const auto &c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.check();
        } catch (const std::exception &e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool on_time = secs <= c.budget_seconds;
        const bool pass = out.pass && on_time;
        failures += !pass;
        std::printf("%s %2d %s: %s [%.2fs, budget %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    out.detail.c_str(), secs, c.budget_seconds, on_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
