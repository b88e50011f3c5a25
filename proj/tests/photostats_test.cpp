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

#include "mpqkd/photostats.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "mpqkd/rng.hpp"

using namespace mpqkd;
using cd = std::complex<double>;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Frozen from tests/oracles/wick_moments.py (ladder-operator Wick expansion).
constexpr double kWrongBasisVariance = 20000684.95107667;
constexpr double kErrorAtZeroLoss = 1.8911398544777286e-8;
constexpr double kErrorAtHalfLoss = 0.048605101179928787;
constexpr double kTapHalfProbability = 0.95139489882007121;
constexpr double kTapDiagCorrelation = 0.8181874787582808;

}  // namespace

TEST(Photostats, wrong_basis_variance) {
    auto s = alice_source(SourceParams{}, Bit::kOne, Basis::kVH);
    auto m = diff_number_moments(s, Basis::kDiag);
    EXPECT_NEAR(m.mean, 0.0, 1e-6);
    EXPECT_LT(rel(m.variance, kWrongBasisVariance), 1e-10);
}

TEST(Photostats, coherent_state_is_at_shot_noise) {
    auto s = make_coherent_seed(cd(30, 5), cd(-12, 20));
    for (Basis b : {Basis::kVH, Basis::kDiag}) {
        auto m = diff_number_moments(s, b);
        EXPECT_LT(rel(m.variance, s.total_mean_photon_number()), 1e-12);
    }
}

TEST(Photostats, diag_moments_equal_vh_moments_after_rotation) {
    auto s = apply_two_mode_squeeze(make_coherent_seed(cd(3, 1), cd(-1, 2)), 0.7, 0.4);
    auto diag = diff_number_moments(s, Basis::kDiag);
    auto vh = diff_number_moments(apply_rotation(s, std::numbers::pi / 4), Basis::kVH);
    EXPECT_NEAR(diag.mean, vh.mean, 1e-11);
    EXPECT_NEAR(diag.variance, vh.variance, 1e-10);
}

TEST(Photostats, form_rejects_out_of_range_modes) {
    EXPECT_THROW(diff_number_form(Basis::kVH, 2, 1), std::invalid_argument);
    EXPECT_THROW(diff_number_moments(GaussianState::vacuum({"a", "b", "c", "d"}), Basis::kVH), std::invalid_argument);
}

TEST(Photostats, error_probability_closed_form) {
    const SourceParams p;
    const auto quiet = DetectorModel::noiseless();
    EXPECT_LT(rel(bob_error_vs_loss(p, 0.0, quiet), kErrorAtZeroLoss), 1e-9);
    EXPECT_LT(rel(bob_error_vs_loss(p, 0.5, quiet), kErrorAtHalfLoss), 1e-9);
    EXPECT_THROW(bob_error_vs_loss(p, 1.0, quiet), std::invalid_argument);
    EXPECT_THROW(bob_error_vs_loss(p, -0.1, quiet), std::invalid_argument);
}

TEST(Photostats, error_probability_edge_cases) {
    const auto quiet = DetectorModel::noiseless();
    EXPECT_EQ(error_probability({0.0, 10.0}, quiet), 0.5);
    EXPECT_EQ(error_probability({5.0, 0.0}, quiet), 0.0);
    // Symmetric in the sign of the mean.
    EXPECT_DOUBLE_EQ(error_probability({-3.0, 4.0}, quiet), error_probability({3.0, 4.0}, quiet));
    EXPECT_NEAR(error_probability({1.0, 1.0}, quiet), 0.5 * std::erfc(1.0 / std::sqrt(2.0)), 1e-15);
}

TEST(Photostats, detector_noise_adds_in_quadrature) {
    DetectorModel d;
    d.noise_equivalent_number = 250;
    EXPECT_DOUBLE_EQ(d.difference_noise_variance(), 125000.0);
    const DiffMoments m{2460.0, 2e5};
    EXPECT_NEAR(error_probability(m, d), 0.5 * std::erfc(2460.0 / std::sqrt(2.0 * 325000.0)), 1e-18);
    d.noise_equivalent_number = -1;
    EXPECT_THROW(d.validate(), std::invalid_argument);
    d = {};
    d.quantum_efficiency = 0;
    EXPECT_THROW(d.validate(), std::invalid_argument);
}

TEST(Photostats, quantum_efficiency_acts_as_loss) {
    const SourceParams p;
    DetectorModel d = DetectorModel::noiseless();
    d.quantum_efficiency = 0.8;
    EXPECT_NEAR(bob_error_vs_loss(p, 0.5, d), bob_error_vs_loss(p, 0.6, DetectorModel::noiseless()), 1e-15);
}

TEST(Photostats, error_rate_increases_with_loss) {
    const SourceParams p;
    for (const auto &d : {DetectorModel::noiseless(), DetectorModel{}}) {
        double prev = bob_error_vs_loss(p, 0.0, d);
        for (int i = 1; i <= 90; ++i) {
            const double cur = bob_error_vs_loss(p, i / 100.0, d);
            EXPECT_GT(cur, prev) << "eta=" << i / 100.0;
            prev = cur;
        }
    }
}

TEST(Photostats, eve_tap_probability_anchors) {
    const SourceParams p;
    EXPECT_EQ(eve_tap_probability(p, 0.0), 0.5);
    EXPECT_LT(rel(eve_tap_probability(p, 0.5), kTapHalfProbability), 1e-12);
    EXPECT_LT(rel(eve_tap_probability(p, 1.0), 1.0 - kErrorAtZeroLoss), 1e-15);
    double prev = 0.5;
    for (int i = 1; i <= 100; ++i) {
        const double cur = eve_tap_probability(p, i / 100.0);
        EXPECT_GT(cur, prev);
        prev = cur;
    }
}

TEST(Photostats, squeezing_beats_shot_noise_for_random_sources) {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> gain(1.0 + 1e-6, 30.0);
    std::uniform_real_distribution<double> log_total(std::log(1e4), std::log(1e7));
    std::uniform_real_distribution<double> frac(0.001, 0.5);
    for (int i = 0; i < 200; ++i) {
        SourceParams p;
        p.gain = gain(rng);
        p.n_total_amp = std::exp(log_total(rng));
        p.bit_amplitude = frac(rng) * p.seed_total();
        const Source src(p);
        for (Basis b : {Basis::kVH, Basis::kDiag}) {
            auto s = src.pulse(Bit::kOne, b);
            const double right = diff_number_moments(s, b).variance;
            const double wrong = diff_number_moments(s, other(b)).variance;
            EXPECT_LT(rel(right, p.n_total_amp / p.gain), 1e-7) << "G=" << p.gain << " NT=" << p.n_total_amp;
            EXPECT_GT(wrong, p.n_total_amp);
            EXPECT_LT(right, p.n_total_amp);
        }
    }
}

TEST(Photostats, sampled_outcomes_follow_the_moments) {
    const DiffMoments m{2460.0, 2e5};
    const DetectorModel d;
    auto rng = derive_stream(1, 0, StreamId::kBob);
    const int n = 1000000;
    double s1 = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_outcome(m, d, rng);
        s1 += x;
        s2 += x * x;
    }
    const double mean = s1 / n;
    const double sd = std::sqrt(s2 / n - mean * mean);
    const double expected_sd = std::sqrt(2e5 + 125000.0);
    EXPECT_NEAR(expected_sd, 570.0877125, 1e-6);
    EXPECT_NEAR(mean, 2460.0, 5 * expected_sd / std::sqrt(n));
    EXPECT_LT(rel(sd, expected_sd), 5e-3);
}

TEST(Photostats, sampling_is_deterministic_per_stream) {
    const DiffMoments m{10.0, 4.0};
    auto a = derive_stream(9, 123, StreamId::kBob);
    auto b = derive_stream(9, 123, StreamId::kBob);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_outcome(m, DetectorModel{}, a), sample_outcome(m, DetectorModel{}, b));
    EXPECT_EQ(sample_outcome({7.0, 0.0}, DetectorModel::noiseless(), a), 7.0);
}

TEST(Photostats, distribution_curves_are_normalized) {
    const Source src{SourceParams{}};
    for (const auto &d : {DetectorModel::noiseless(), DetectorModel{}}) {
        for (Basis measured : {Basis::kVH, Basis::kDiag}) {
            auto s = src.pulse(Bit::kZero, Basis::kVH);
            auto m = diff_number_moments(s, measured);
            const double sigma = std::sqrt(m.variance + d.difference_noise_variance());
            std::vector<double> grid;
            for (int i = 0; i <= 4000; ++i) grid.push_back(m.mean - 10 * sigma + i * (20 * sigma / 4000));
            auto curve = distribution_curve(s, measured, d, grid);
            ASSERT_EQ(curve.size(), grid.size());
            double area = 0;
            for (size_t i = 1; i < curve.size(); ++i) {
                area += 0.5 * (curve[i].density + curve[i - 1].density) * (curve[i].n - curve[i - 1].n);
            }
            EXPECT_NEAR(area, 1.0, 1e-9);
        }
    }
}

TEST(Photostats, tap_correlations) {
    auto s = alice_source(SourceParams{}, Bit::kOne, Basis::kVH);
    auto vh = joint_diff_moments(tap_split(s, 0.5), Basis::kVH, Basis::kVH);
    EXPECT_LT(rel(vh.bob.mean, 1230.0), 1e-9);
    EXPECT_LT(rel(vh.eve.mean, 1230.0), 1e-9);
    EXPECT_LT(rel(vh.bob.variance, 5.5e5), 1e-9);
    EXPECT_LT(rel(vh.covariance, -4.5e5), 1e-8);
    EXPECT_NEAR(vh.correlation(), -9.0 / 11.0, 1e-9);

    auto diag = joint_diff_moments(tap_split(s, 0.5), Basis::kDiag, Basis::kDiag);
    EXPECT_NEAR(diag.correlation(), kTapDiagCorrelation, 1e-9);
}

TEST(Photostats, joint_marginals_match_single_arm_moments) {
    auto s = alice_source(SourceParams{}, Bit::kZero, Basis::kDiag);
    for (double eta : {0.2, 0.7}) {
        auto joint = tap_split(s, eta);
        for (Basis bb : {Basis::kVH, Basis::kDiag}) {
            for (Basis be : {Basis::kVH, Basis::kDiag}) {
                auto j = joint_diff_moments(joint, bb, be);
                auto bob = diff_number_moments(apply_loss(s, eta), bb);
                auto eve = diff_number_moments(apply_loss(s, 1 - eta), be);
                EXPECT_LT(std::abs(j.bob.mean - bob.mean), 1e-6);
                EXPECT_LT(rel(j.bob.variance, bob.variance), 1e-9);
                EXPECT_LT(std::abs(j.eve.mean - eve.mean), 1e-6);
                EXPECT_LT(rel(j.eve.variance, eve.variance), 1e-9);
            }
        }
    }
    EXPECT_THROW(joint_diff_moments(s, Basis::kVH, Basis::kVH), std::invalid_argument);
}

TEST(Photostats, coherent_tap_arms_are_independent) {
    auto s = make_coherent_seed(cd(40, 3), cd(-7, 25));
    for (Basis b : {Basis::kVH, Basis::kDiag}) {
        auto j = joint_diff_moments(tap_split(s, 0.4), b, b);
        EXPECT_NEAR(j.covariance, 0.0, 1e-9);
    }
}
