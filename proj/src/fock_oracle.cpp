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

#include "mpqkd/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace mpqkd::fock {

namespace {

using cd = std::complex<double>;

Eigen::VectorXcd coherent_amplitudes(cd alpha, int cutoff) {
    Eigen::VectorXcd c(cutoff + 1);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n <= cutoff; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return c;
}

// exp(phi (a^dag b - a b^dag)) restricted to the N-photon block, basis
// |k, N-k> with k photons in the first mode. Written as U exp(-i phi T) U^dag
// with T the symmetric tridiagonal matrix of couplings sqrt((k+1)(N-k)) and
// U = diag(i^k).
Eigen::MatrixXd beamsplitter_block(int total, double phi) {
    const int dim = total + 1;
    if (dim == 1) return Eigen::MatrixXd::Ones(1, 1);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k < total; ++k) {
        const double c = std::sqrt(static_cast<double>((k + 1) * (total - k)));
        T(k, k + 1) = c;
        T(k + 1, k) = c;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(T);
    const auto &V = solver.eigenvectors();
    Eigen::VectorXcd phases(dim);
    for (int j = 0; j < dim; ++j) phases(j) = std::exp(cd(0.0, -phi * solver.eigenvalues()(j)));
    Eigen::MatrixXcd E = V.cast<cd>() * phases.asDiagonal() * V.transpose().cast<cd>();
    static const cd kPowI[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
    Eigen::MatrixXd out(dim, dim);
    for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
            // U E U^dag is real for a real generator.
            out(a, b) = (kPowI[a % 4] * E(a, b) * std::conj(kPowI[b % 4])).real();
        }
    }
    return out;
}

// B(k, n) = C(n, k) t^k (1 - t)^(n - k).
Eigen::MatrixXd binomial_matrix(int dim, double transmission) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) {
        for (int k = 0; k <= n; ++k) {
            if ((transmission == 0.0 && k > 0) || (transmission == 1.0 && k < n)) continue;
            double log_p = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
            if (k > 0) log_p += k * std::log(transmission);
            if (n - k > 0) log_p += (n - k) * std::log1p(-transmission);
            B(k, n) = std::exp(log_p);
        }
    }
    return B;
}

DiffDistribution difference_of(const Eigen::MatrixXd &joint) {
    DiffDistribution out;
    for (Eigen::Index a = 0; a < joint.rows(); ++a) {
        for (Eigen::Index b = 0; b < joint.cols(); ++b) {
            if (joint(a, b) != 0.0) out[static_cast<int>(a - b)] += joint(a, b);
        }
    }
    return out;
}

void check_eta(double eta, const char *op) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw std::invalid_argument(std::string(op) + ": eta must lie in [0, 1]");
    }
}

}  // namespace

FockState::FockState(int cutoff, Eigen::MatrixXcd amplitudes) : cutoff_(cutoff), amps_(std::move(amplitudes)) {
    if (cutoff_ < 0 || amps_.rows() != cutoff_ + 1 || amps_.cols() != cutoff_ + 1) {
        throw std::invalid_argument("FockState: amplitude array does not match the cutoff");
    }
}

double FockState::truncation_error() const { return std::max(0.0, 1.0 - amps_.squaredNorm()); }

int recommended_cutoff(cd alpha_v, cd alpha_h, double r, double theta) {
    const double mu = std::cosh(r);
    const cd nu = std::polar(std::sinh(r), theta);
    const double thermal = std::sinh(r) * std::sinh(r);
    const double mean_v = std::norm(mu * alpha_v + nu * std::conj(alpha_h)) + thermal;
    const double mean_h = std::norm(mu * alpha_h + nu * std::conj(alpha_v)) + thermal;
    // Each marginal is displaced thermal, wider than Poisson once r > 0.
    auto width = [thermal](double mean) {
        const double coherent = mean - thermal;
        return std::sqrt(std::max(mean, thermal * (thermal + 1.0) + coherent * (2.0 * thermal + 1.0)));
    };
    const double busiest = std::max(mean_v + 8.0 * width(mean_v), mean_h + 8.0 * width(mean_h));
    return static_cast<int>(std::ceil(busiest));
}

FockState build_state_exact(cd alpha_v, cd alpha_h, double r, double theta, int cutoff, bool allow_truncation) {
    if (!(r >= 0)) throw std::invalid_argument("build_state_exact: r must be >= 0");
    if (cutoff < 1 || cutoff > kMaxCutoff) {
        throw std::invalid_argument("build_state_exact: cutoff must lie in [1, " + std::to_string(kMaxCutoff) + "]");
    }
    const int needed = recommended_cutoff(alpha_v, alpha_h, r, theta);
    if (!allow_truncation && cutoff < needed) {
        std::ostringstream msg;
        msg << "build_state_exact: cutoff " << cutoff << " below the sizing rule (" << needed << ")";
        throw TruncationError(msg.str());
    }
    const int dim = cutoff + 1;
    const Eigen::VectorXcd cv = coherent_amplitudes(alpha_v, cutoff);
    const Eigen::VectorXcd ch = coherent_amplitudes(alpha_h, cutoff);
    const Eigen::MatrixXcd psi = cv * ch.transpose();

    // Disentangled squeeze: exp(tau a^dag b^dag) cosh(r)^-(n_a + n_b + 1) exp(-conj(tau) a b).
    // Coherent inputs are eigenstates of a b, so the lowering factor is a scalar.
    const cd tau = std::polar(std::tanh(r), theta);
    Eigen::MatrixXcd lowered = std::exp(-std::conj(tau) * alpha_v * alpha_h) * psi;
    const double inv_cosh = 1.0 / std::cosh(r);
    for (int p = 0; p < dim; ++p) {
        for (int q = 0; q < dim; ++q) lowered(p, q) *= std::pow(inv_cosh, p + q + 1);
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (int p = 0; p < dim; ++p) {
        for (int q = 0; q < dim; ++q) {
            const cd src = lowered(p, q);
            if (src == 0.0) continue;
            cd coef = 1.0;
            out(p, q) += src;
            for (int k = 1; p + k < dim && q + k < dim; ++k) {
                coef *= tau / static_cast<double>(k) * std::sqrt(static_cast<double>((p + k) * (q + k)));
                out(p + k, q + k) += coef * src;
            }
        }
    }
    FockState state(cutoff, std::move(out));
    if (!allow_truncation && state.truncation_error() > kMaxTruncation) {
        std::ostringstream msg;
        msg << "build_state_exact: norm deficit " << state.truncation_error() << " exceeds " << kMaxTruncation;
        throw TruncationError(msg.str());
    }
    return state;
}

Eigen::MatrixXd joint_number_distribution(const FockState &state, Basis basis) {
    const auto &amps = state.amplitudes();
    const int c = state.cutoff();
    if (basis == Basis::kVH) return amps.cwiseAbs2();

    // |n1, n2> in the +45/-45 modes: apply the pi/4 beamsplitter block by block.
    const int dim = 2 * c + 1;
    Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(dim, dim);
    for (int total = 0; total <= 2 * c; ++total) {
        Eigen::VectorXcd in = Eigen::VectorXcd::Zero(total + 1);
        bool any = false;
        for (int k = std::max(0, total - c); k <= std::min(total, c); ++k) {
            in(k) = amps(k, total - k);
            any = any || in(k) != 0.0;
        }
        if (!any) continue;
        const Eigen::VectorXcd rotated = beamsplitter_block(total, std::numbers::pi / 4).cast<cd>() * in;
        for (int k = 0; k <= total; ++k) probs(k, total - k) = std::norm(rotated(k));
    }
    return probs;
}

DiffDistribution exact_diff_distribution(const FockState &state, Basis basis) {
    return difference_of(joint_number_distribution(state, basis));
}

DiffDistribution exact_loss_distribution(const FockState &state, double eta, Basis basis, int ancilla_cutoff) {
    check_eta(eta, "exact_loss_distribution");
    const Eigen::MatrixXd joint = joint_number_distribution(state, basis);
    const auto dim = static_cast<int>(joint.rows());
    if (static_cast<double>(dim) * dim > 1e6) {
        throw std::invalid_argument("exact_loss_distribution: dimension bound exceeded");
    }
    if (ancilla_cutoff < dim - 1) {
        std::ostringstream msg;
        msg << "exact_loss_distribution: ancilla cutoff " << ancilla_cutoff << " cannot absorb up to " << dim - 1
            << " photons";
        throw TruncationError(msg.str());
    }
    // Tracing a vacuum ancilla after the beamsplitter thins each mode binomially.
    const Eigen::MatrixXd B = binomial_matrix(dim, 1.0 - eta);
    return difference_of(B * joint * B.transpose());
}

JointDiffMoments exact_tap_moments(const FockState &state, double eta, Basis basis) {
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("exact_tap_moments: eta must lie in (0, 1)");
    const Eigen::MatrixXd joint = joint_number_distribution(state, basis);
    const auto dim = static_cast<int>(joint.rows());
    const Eigen::MatrixXd B = binomial_matrix(dim, 1.0 - eta);
    // First and second moments of the photons kept by Bob, per input count n.
    std::vector<double> kept1(dim, 0.0), kept2(dim, 0.0);
    for (int n = 0; n < dim; ++n) {
        for (int k = 0; k <= n; ++k) {
            kept1[n] += k * B(k, n);
            kept2[n] += static_cast<double>(k) * k * B(k, n);
        }
    }
    double total = 0, sb = 0, sbb = 0, se = 0, see = 0, sbe = 0;
    for (int n1 = 0; n1 < dim; ++n1) {
        for (int n2 = 0; n2 < dim; ++n2) {
            const double p = joint(n1, n2);
            if (p == 0.0) continue;
            const double d = n1 - n2;
            const double eb = kept1[n1] - kept1[n2];
            const double ebb = kept2[n1] - 2.0 * kept1[n1] * kept1[n2] + kept2[n2];
            total += p;
            sb += p * eb;
            sbb += p * ebb;
            se += p * (d - eb);
            see += p * (d * d - 2.0 * d * eb + ebb);
            sbe += p * (d * eb - ebb);
        }
    }
    JointDiffMoments out;
    out.bob.mean = sb / total;
    out.eve.mean = se / total;
    out.bob.variance = sbb / total - out.bob.mean * out.bob.mean;
    out.eve.variance = see / total - out.eve.mean * out.eve.mean;
    out.covariance = sbe / total - out.bob.mean * out.eve.mean;
    return out;
}

double total_probability(const DiffDistribution &dist) {
    double total = 0;
    for (const auto &[n, p] : dist) total += p;
    return total;
}

DiffMoments distribution_moments(const DiffDistribution &dist) {
    const double total = total_probability(dist);
    double m1 = 0, m2 = 0;
    for (const auto &[n, p] : dist) {
        m1 += n * p;
        m2 += static_cast<double>(n) * n * p;
    }
    m1 /= total;
    m2 /= total;
    return {m1, m2 - m1 * m1};
}

}  // namespace mpqkd::fock
