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

#ifndef MPQKD_GAUSSIAN_STATE_HPP
#define MPQKD_GAUSSIAN_STATE_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mpqkd {

/// Polarization basis in which the photon difference number is measured.
/// kVH: n = n_V - n_H.  kDiag: n = n_{+45} - n_{-45}.
enum class Basis : std::uint8_t { kVH = 0, kDiag = 1 };

enum class Bit : std::uint8_t { kZero = 0, kOne = 1 };

inline Basis other(Basis b) { return b == Basis::kVH ? Basis::kDiag : Basis::kVH; }
inline Bit flipped(Bit b) { return b == Bit::kOne ? Bit::kZero : Bit::kOne; }
const char *to_string(Basis b);

/// Bosonic Gaussian state over labeled modes.
///
/// Quadratures are ordered (x1, p1, x2, p2, ...) with vacuum variance 1/2,
/// so a coherent amplitude alpha sits at (sqrt2 Re alpha, sqrt2 Im alpha) and
/// n_j = (x_j^2 + p_j^2 - 1) / 2. Values are immutable; every operation
/// returns a new state.
class GaussianState {
   public:
    /// Throws std::invalid_argument on dimension mismatch or an asymmetric
    /// covariance (tolerance 1e-12 absolute).
    GaussianState(std::vector<std::string> mode_labels, Eigen::VectorXd mean, Eigen::MatrixXd cov);

    static GaussianState vacuum(std::vector<std::string> mode_labels);

    size_t num_modes() const { return labels_.size(); }
    const std::vector<std::string> &labels() const { return labels_; }
    const Eigen::VectorXd &mean() const { return mean_; }
    const Eigen::MatrixXd &cov() const { return cov_; }

    /// <a_j^dag a_j> for mode j.
    double mean_photon_number(size_t mode) const;
    double total_mean_photon_number() const;

    /// Symplectic spectrum (one value per mode, ascending).
    Eigen::VectorXd symplectic_eigenvalues() const;
    /// Uncertainty principle: every symplectic eigenvalue >= 1/2 - tol.
    bool is_physical(double tol = 1e-9) const;

    /// Reduced state on the listed modes, in the listed order.
    GaussianState marginal(std::span<const size_t> modes) const;

    /// mean -> S mean, cov -> S cov S^T. S must be 2N x 2N.
    GaussianState transformed(const Eigen::MatrixXd &symplectic) const;

   private:
    std::vector<std::string> labels_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
};

/// Block-diagonal symplectic form with per-mode blocks [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(size_t num_modes);

/// Quadrature matrix of a_V -> mu a_V + nu a_H^dag, a_H -> mu a_H + nu a_V^dag
/// with mu = cosh r, nu = e^{i theta} sinh r.
Eigen::MatrixXd two_mode_squeeze_matrix(double r, double theta);

/// a_V -> cos(phi) a_V + sin(phi) a_H, a_H -> -sin(phi) a_V + cos(phi) a_H.
Eigen::MatrixXd rotation_matrix(double phi);

/// 8x8 map on (V, H, V_anc, H_anc): each polarization meets its own vacuum
/// ancilla on a beamsplitter of transmissivity 1 - eta.
Eigen::MatrixXd tap_matrix(double eta);

GaussianState make_coherent_seed(std::complex<double> alpha_v, std::complex<double> alpha_h);

/// Throws std::invalid_argument for r < 0 or a state that is not two-mode.
GaussianState apply_two_mode_squeeze(const GaussianState &state, double r, double theta);

GaussianState apply_rotation(const GaussianState &state, double phi);

/// Non-polarizing loss; eta is the lost fraction. Works for any mode count.
GaussianState apply_loss(const GaussianState &state, double eta);

/// Four-mode joint state (V_B, H_B, V_E, H_E) after tapping fraction eta of
/// a two-mode pulse. Requires 0 < eta < 1.
GaussianState tap_split(const GaussianState &state, double eta);

/// Alice's pulse design.
struct SourceParams {
    double gain = 10.0;                            // G > 1
    double n_total_amp = 2.0e6;                    // N_T of the amplified pulse
    double bit_amplitude = 2460.0;                 // N, mean difference number
    double squeeze_phase = std::numbers::pi / 2;  // theta

    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;
    double seed_total() const { return n_total_amp / gain; }
};

/// Squeeze parameter r solving the exact gain equation
///   N_T,amp = S cosh 2r + 2 |alpha_V||alpha_H| sinh 2r + 2 sinh^2 r
/// for the aligned-phase seed, by bisection to 1e-12 relative.
double solve_squeeze_parameter(const SourceParams &params);

/// Seed amplitudes for a bit: |alpha_V|^2 - |alpha_H|^2 = +/-N, total N_T/G,
/// alpha_V real and alpha_H a quarter period ahead.
std::pair<std::complex<double>, std::complex<double>> seed_amplitudes(const SourceParams &params, Bit bit);

/// Amplified pulse with <n> = +N (bit 1) or -N (bit 0) in `basis`.
GaussianState alice_source(const SourceParams &params, Bit bit, Basis basis);

/// Same, with the squeeze parameter already solved (hot path for sessions).
GaussianState alice_source(const SourceParams &params, double squeeze_r, Bit bit, Basis basis);

/// SourceParams with its squeeze parameter solved once.
struct Source {
    SourceParams params;
    double squeeze_r;

    explicit Source(const SourceParams &p) : params(p), squeeze_r(solve_squeeze_parameter(p)) {}
    GaussianState pulse(Bit bit, Basis basis) const { return alice_source(params, squeeze_r, bit, basis); }
};

}  // namespace mpqkd

#endif
