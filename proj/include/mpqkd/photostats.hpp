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

#ifndef MPQKD_PHOTOSTATS_HPP
#define MPQKD_PHOTOSTATS_HPP

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "mpqkd/gaussian_state.hpp"

namespace mpqkd {

/// First two moments of the photon difference number, in photons / photons^2.
struct DiffMoments {
    double mean = 0;
    double variance = 0;
};

/// Photodiode pair used to count the two polarization modes.
struct DetectorModel {
    /// RMS read noise per detector, in photons.
    double noise_equivalent_number = 250.0;
    /// Applied upstream as loss 1 - quantum_efficiency.
    double quantum_efficiency = 1.0;

    void validate() const;
    /// Read-noise variance added to the difference of two detectors.
    double difference_noise_variance() const { return 2.0 * noise_equivalent_number * noise_equivalent_number; }

    static DetectorModel noiseless() { return DetectorModel{0.0, 1.0}; }
};

struct JointDiffMoments {
    DiffMoments bob;
    DiffMoments eve;
    double covariance = 0;

    double correlation() const { return covariance / std::sqrt(bob.variance * eve.variance); }
};

/// Quadratic form F with n = r^T F r - const over `num_modes` modes, acting on
/// the pair starting at `first_mode`; kDiag is the kVH form conjugated by the
/// pi/4 rotation.
Eigen::MatrixXd diff_number_form(Basis basis, size_t num_modes = 2, size_t first_mode = 0);

/// mean = tr(F cov) + m^T F m,
/// var  = 2 tr(F cov F cov) + tr(F Omega F Omega) / 2 + 4 m^T F cov F m.
DiffMoments diff_number_moments(const GaussianState &state, Basis basis);

/// Moments of Bob's (modes 0, 1) and Eve's (modes 2, 3) difference numbers
/// in a tap_split joint state, plus their covariance.
JointDiffMoments joint_diff_moments(const GaussianState &joint, Basis basis_b, Basis basis_e);

/// Draw from Normal(mean, variance + detector read noise). Real-valued.
template <class Rng>
double sample_outcome(const DiffMoments &moments, const DetectorModel &detector, Rng &rng) {
    const double sigma = std::sqrt(moments.variance + detector.difference_noise_variance());
    if (sigma == 0.0) return moments.mean;
    std::normal_distribution<double> dist(moments.mean, sigma);
    return dist(rng);
}

/// Probability that the Gaussian outcome lands on the wrong side of zero.
double error_probability(const DiffMoments &moments, const DetectorModel &detector);

/// Alice -> loss eta (and detector efficiency) -> Bob, correct basis.
double bob_error_vs_loss(const SourceParams &params, double eta, const DetectorModel &detector);

/// Eve's chance of the right bit when she keeps fraction eta of the pulse,
/// knows the basis and uses a noiseless detector.
double eve_tap_probability(const SourceParams &params, double eta);

struct CurvePoint {
    double n = 0;
    double density = 0;
};

/// Gaussian density of the measured n (with detector broadening) on `grid`.
std::vector<CurvePoint> distribution_curve(const GaussianState &state, Basis basis, const DetectorModel &detector,
                                           std::span<const double> grid);

}  // namespace mpqkd

#endif
