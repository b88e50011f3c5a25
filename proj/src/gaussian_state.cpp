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

#include "mpqkd/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace mpqkd {

namespace {

constexpr double kSymmetryTol = 1e-12;

void require_two_modes(const GaussianState &state, const char *op) {
    if (state.num_modes() != 2) {
        std::ostringstream msg;
        msg << op << ": expected a two-mode state, got " << state.num_modes() << " modes";
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

const char *to_string(Basis b) { return b == Basis::kVH ? "VH" : "DIAG"; }

GaussianState::GaussianState(std::vector<std::string> mode_labels, Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : labels_(std::move(mode_labels)), mean_(std::move(mean)), cov_(std::move(cov)) {
    const auto dim = static_cast<Eigen::Index>(2 * labels_.size());
    if (labels_.empty() || mean_.size() != dim || cov_.rows() != dim || cov_.cols() != dim) {
        throw std::invalid_argument("GaussianState: mean/cov dimensions do not match the mode labels");
    }
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
        throw std::invalid_argument("GaussianState: covariance is not symmetric");
    }
    // Remove round-off asymmetry so downstream eigensolvers see an exactly symmetric matrix.
    cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
}

GaussianState GaussianState::vacuum(std::vector<std::string> mode_labels) {
    const auto dim = static_cast<Eigen::Index>(2 * mode_labels.size());
    return GaussianState(std::move(mode_labels), Eigen::VectorXd::Zero(dim), 0.5 * Eigen::MatrixXd::Identity(dim, dim));
}

double GaussianState::mean_photon_number(size_t mode) const {
    const auto i = static_cast<Eigen::Index>(2 * mode);
    return 0.5 * (cov_(i, i) + cov_(i + 1, i + 1) + mean_(i) * mean_(i) + mean_(i + 1) * mean_(i + 1) - 1.0);
}

double GaussianState::total_mean_photon_number() const {
    double total = 0;
    for (size_t j = 0; j < num_modes(); ++j) total += mean_photon_number(j);
    return total;
}

Eigen::VectorXd GaussianState::symplectic_eigenvalues() const {
    // Eigenvalues of Omega * cov come in pairs +/- i nu.
    Eigen::EigenSolver<Eigen::MatrixXd> solver(symplectic_form(num_modes()) * cov_, false);
    std::vector<double> nus;
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
        if (solver.eigenvalues()(k).imag() > 0) nus.push_back(solver.eigenvalues()(k).imag());
    }
    std::sort(nus.begin(), nus.end());
    Eigen::VectorXd out(static_cast<Eigen::Index>(nus.size()));
    for (size_t k = 0; k < nus.size(); ++k) out(static_cast<Eigen::Index>(k)) = nus[k];
    return out;
}

bool GaussianState::is_physical(double tol) const {
    if (!cov_.allFinite() || !mean_.allFinite()) return false;
    auto nus = symplectic_eigenvalues();
    // A pair that collapsed onto the real axis (nu == 0) would go missing.
    if (static_cast<size_t>(nus.size()) != num_modes()) return false;
    return nus.minCoeff() >= 0.5 - tol;
}

GaussianState GaussianState::marginal(std::span<const size_t> modes) const {
    const auto dim = static_cast<Eigen::Index>(2 * modes.size());
    Eigen::VectorXd m(dim);
    Eigen::MatrixXd c(dim, dim);
    std::vector<std::string> labels;
    for (size_t a = 0; a < modes.size(); ++a) {
        if (modes[a] >= num_modes()) throw std::out_of_range("GaussianState::marginal: mode index out of range");
        labels.push_back(labels_[modes[a]]);
        for (int qa = 0; qa < 2; ++qa) {
            const auto ia = static_cast<Eigen::Index>(2 * a + qa);
            const auto sa = static_cast<Eigen::Index>(2 * modes[a] + qa);
            m(ia) = mean_(sa);
            for (size_t b = 0; b < modes.size(); ++b) {
                for (int qb = 0; qb < 2; ++qb) {
                    c(ia, static_cast<Eigen::Index>(2 * b + qb)) = cov_(sa, static_cast<Eigen::Index>(2 * modes[b] + qb));
                }
            }
        }
    }
    return GaussianState(std::move(labels), std::move(m), std::move(c));
}

GaussianState GaussianState::transformed(const Eigen::MatrixXd &symplectic) const {
    if (symplectic.rows() != mean_.size() || symplectic.cols() != mean_.size()) {
        throw std::invalid_argument("GaussianState::transformed: matrix dimension mismatch");
    }
    return GaussianState(labels_, symplectic * mean_, symplectic * cov_ * symplectic.transpose());
}

Eigen::MatrixXd symplectic_form(size_t num_modes) {
    const auto dim = static_cast<Eigen::Index>(2 * num_modes);
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index j = 0; j < dim; j += 2) {
        omega(j, j + 1) = 1.0;
        omega(j + 1, j) = -1.0;
    }
    return omega;
}

Eigen::MatrixXd two_mode_squeeze_matrix(double r, double theta) {
    const double mu = std::cosh(r);
    const double s = std::sinh(r);
    const double c = std::cos(theta);
    const double d = std::sin(theta);
    // With nu = s (c + i d):
    //   x_V' = mu x_V + s (c x_H + d p_H),  p_V' = mu p_V + s (d x_H - c p_H)
    // and the same with V <-> H.
    Eigen::MatrixXd S(4, 4);
    S << mu, 0, s * c, s * d,
         0, mu, s * d, -s * c,
         s * c, s * d, mu, 0,
         s * d, -s * c, 0, mu;
    return S;
}

Eigen::MatrixXd rotation_matrix(double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(4, 4);
    for (int q = 0; q < 2; ++q) {
        R(q, q) = c;
        R(q, 2 + q) = s;
        R(2 + q, q) = -s;
        R(2 + q, 2 + q) = c;
    }
    return R;
}

Eigen::MatrixXd tap_matrix(double eta) {
    const double t = std::sqrt(1.0 - eta);
    const double e = std::sqrt(eta);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(8, 8);
    for (int pol = 0; pol < 2; ++pol) {
        for (int q = 0; q < 2; ++q) {
            const int in = 2 * pol + q;
            const int anc = 4 + 2 * pol + q;
            S(in, in) = t;     // Bob <- pulse
            S(in, anc) = -e;   // Bob <- ancilla
            S(anc, in) = e;    // Eve <- pulse
            S(anc, anc) = t;   // Eve <- ancilla
        }
    }
    return S;
}

GaussianState make_coherent_seed(std::complex<double> alpha_v, std::complex<double> alpha_h) {
    Eigen::VectorXd mean(4);
    mean << std::sqrt(2.0) * alpha_v.real(), std::sqrt(2.0) * alpha_v.imag(), std::sqrt(2.0) * alpha_h.real(),
        std::sqrt(2.0) * alpha_h.imag();
    return GaussianState({"V", "H"}, std::move(mean), 0.5 * Eigen::MatrixXd::Identity(4, 4));
}

GaussianState apply_two_mode_squeeze(const GaussianState &state, double r, double theta) {
    if (!(r >= 0)) throw std::invalid_argument("apply_two_mode_squeeze: squeeze parameter r must be >= 0");
    require_two_modes(state, "apply_two_mode_squeeze");
    return state.transformed(two_mode_squeeze_matrix(r, theta));
}

GaussianState apply_rotation(const GaussianState &state, double phi) {
    require_two_modes(state, "apply_rotation");
    return state.transformed(rotation_matrix(phi));
}

GaussianState apply_loss(const GaussianState &state, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("apply_loss: eta must lie in [0, 1]");
    const double t = 1.0 - eta;
    const auto dim = state.mean().size();
    return GaussianState(state.labels(), std::sqrt(t) * state.mean(),
                         t * state.cov() + 0.5 * eta * Eigen::MatrixXd::Identity(dim, dim));
}

GaussianState tap_split(const GaussianState &state, double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("tap_split: eta must lie in (0, 1)");
    require_two_modes(state, "tap_split");
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(8);
    Eigen::MatrixXd cov = 0.5 * Eigen::MatrixXd::Identity(8, 8);
    mean.head(4) = state.mean();
    cov.topLeftCorner(4, 4) = state.cov();
    GaussianState joint({"V_B", "H_B", "V_E", "H_E"}, std::move(mean), std::move(cov));
    return joint.transformed(tap_matrix(eta));
}

void SourceParams::validate() const {
    std::vector<std::string> problems;
    if (!(gain > 1.0)) problems.push_back("gain must be > 1");
    if (!(n_total_amp > 0.0)) problems.push_back("n_total_amp must be > 0");
    if (!(bit_amplitude > 0.0)) problems.push_back("bit_amplitude must be > 0");
    if (gain > 1.0 && n_total_amp > 0.0 && !(bit_amplitude < n_total_amp / gain)) {
        problems.push_back("bit_amplitude must be < n_total_amp / gain (seed imbalance not realizable)");
    }
    if (!std::isfinite(squeeze_phase)) problems.push_back("squeeze_phase must be finite");
    if (problems.empty()) return;
    std::ostringstream msg;
    msg << "invalid SourceParams:";
    for (const auto &p : problems) msg << ' ' << p << ';';
    throw std::invalid_argument(msg.str());
}

double solve_squeeze_parameter(const SourceParams &params) {
    params.validate();
    const double S = params.seed_total();
    const double N = params.bit_amplitude;
    const double cross = std::sqrt((S + N) * (S - N));  // 2 |alpha_V| |alpha_H|
    auto excess = [&](double r) {
        const double sh = std::sinh(r);
        return S * std::cosh(2 * r) + cross * std::sinh(2 * r) + 2 * sh * sh - params.n_total_amp;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (excess(hi) < 0) hi *= 2;
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<std::complex<double>, std::complex<double>> seed_amplitudes(const SourceParams &params, Bit bit) {
    const double S = params.seed_total();
    const double big = std::sqrt(0.5 * (S + params.bit_amplitude));
    const double small = std::sqrt(0.5 * (S - params.bit_amplitude));
    const double v = bit == Bit::kOne ? big : small;
    const double h = bit == Bit::kOne ? small : big;
    return {std::complex<double>(v, 0.0), std::complex<double>(0.0, h)};
}

GaussianState alice_source(const SourceParams &params, double squeeze_r, Bit bit, Basis basis) {
    auto [alpha_v, alpha_h] = seed_amplitudes(params, bit);
    auto state = apply_two_mode_squeeze(make_coherent_seed(alpha_v, alpha_h), squeeze_r, params.squeeze_phase);
    // Inverse of the measurement rotation: the V/H content lands on the +45/-45 modes.
    if (basis == Basis::kDiag) state = apply_rotation(state, -std::numbers::pi / 4);
    return state;
}

GaussianState alice_source(const SourceParams &params, Bit bit, Basis basis) {
    return alice_source(params, solve_squeeze_parameter(params), bit, basis);
}

}  // namespace mpqkd
