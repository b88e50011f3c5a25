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

#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mpqkd {

namespace {

double moment_mean(const Eigen::MatrixXd &F, const GaussianState &s) {
    return (F * s.cov()).trace() + s.mean().dot(F * s.mean());
}

double moment_cross(const Eigen::MatrixXd &F, const Eigen::MatrixXd &G, const GaussianState &s,
                    const Eigen::MatrixXd &omega) {
    const Eigen::MatrixXd &cov = s.cov();
    double value = 2.0 * (F * cov * G * cov).trace() + 4.0 * s.mean().dot(F * cov * G * s.mean());
    // Ordering correction; vanishes when F and G act on disjoint modes.
    value += 0.5 * (F * omega * G * omega).trace();
    return value;
}

}  // namespace

void DetectorModel::validate() const {
    std::vector<std::string> problems;
    if (!(noise_equivalent_number >= 0.0) || !std::isfinite(noise_equivalent_number)) {
        problems.push_back("noise_equivalent_number must be >= 0");
    }
    if (!(quantum_efficiency > 0.0 && quantum_efficiency <= 1.0)) {
        problems.push_back("quantum_efficiency must lie in (0, 1]");
    }
    if (problems.empty()) return;
    std::ostringstream msg;
    msg << "invalid DetectorModel:";
    for (const auto &p : problems) msg << ' ' << p << ';';
    throw std::invalid_argument(msg.str());
}

Eigen::MatrixXd diff_number_form(Basis basis, size_t num_modes, size_t first_mode) {
    if (first_mode + 2 > num_modes) throw std::invalid_argument("diff_number_form: mode pair out of range");
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(4, 4);
    local.diagonal() << 0.5, 0.5, -0.5, -0.5;
    if (basis == Basis::kDiag) {
        const Eigen::MatrixXd R = rotation_matrix(std::numbers::pi / 4);
        local = (R.transpose() * local * R).eval();
    }
    const auto dim = static_cast<Eigen::Index>(2 * num_modes);
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(dim, dim);
    F.block(static_cast<Eigen::Index>(2 * first_mode), static_cast<Eigen::Index>(2 * first_mode), 4, 4) = local;
    return F;
}

DiffMoments diff_number_moments(const GaussianState &state, Basis basis) {
    if (state.num_modes() != 2) {
        throw std::invalid_argument("diff_number_moments: expected a two-mode state");
    }
    const Eigen::MatrixXd F = diff_number_form(basis);
    return {moment_mean(F, state), moment_cross(F, F, state, symplectic_form(2))};
}

JointDiffMoments joint_diff_moments(const GaussianState &joint, Basis basis_b, Basis basis_e) {
    if (joint.num_modes() != 4) {
        throw std::invalid_argument("joint_diff_moments: expected a four-mode state");
    }
    const Eigen::MatrixXd omega = symplectic_form(4);
    const Eigen::MatrixXd Fb = diff_number_form(basis_b, 4, 0);
    const Eigen::MatrixXd Fe = diff_number_form(basis_e, 4, 2);
    JointDiffMoments out;
    out.bob = {moment_mean(Fb, joint), moment_cross(Fb, Fb, joint, omega)};
    out.eve = {moment_mean(Fe, joint), moment_cross(Fe, Fe, joint, omega)};
    out.covariance = moment_cross(Fb, Fe, joint, omega);
    return out;
}

double error_probability(const DiffMoments &moments, const DetectorModel &detector) {
    const double total = moments.variance + detector.difference_noise_variance();
    if (moments.mean == 0.0) return 0.5;
    if (total <= 0.0) return 0.0;
    return 0.5 * std::erfc(std::abs(moments.mean) / std::sqrt(2.0 * total));
}

double bob_error_vs_loss(const SourceParams &params, double eta, const DetectorModel &detector) {
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("bob_error_vs_loss: eta must lie in [0, 1)");
    detector.validate();
    const double effective = 1.0 - (1.0 - eta) * detector.quantum_efficiency;
    const auto state = apply_loss(alice_source(params, Bit::kOne, Basis::kVH), effective);
    return error_probability(diff_number_moments(state, Basis::kVH), detector);
}

double eve_tap_probability(const SourceParams &params, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eve_tap_probability: eta must lie in [0, 1]");
    const auto kept = apply_loss(alice_source(params, Bit::kOne, Basis::kVH), 1.0 - eta);
    return 1.0 - error_probability(diff_number_moments(kept, Basis::kVH), DetectorModel::noiseless());
}

std::vector<CurvePoint> distribution_curve(const GaussianState &state, Basis basis, const DetectorModel &detector,
                                           std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("distribution_curve: empty grid");
    const auto m = diff_number_moments(state, basis);
    const double var = m.variance + detector.difference_noise_variance();
    if (!(var > 0.0)) throw std::invalid_argument("distribution_curve: degenerate distribution");
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * var);
    std::vector<CurvePoint> out;
    out.reserve(grid.size());
    for (double n : grid) {
        const double z = n - m.mean;
        out.push_back({n, norm * std::exp(-0.5 * z * z / var)});
    }
    return out;
}

}  // namespace mpqkd
