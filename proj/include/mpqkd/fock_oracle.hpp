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

// Exact truncated Fock-space simulation of two-mode squeezed coherent states.
// Used only at desk scale (a few photons per mode) as the independent check
// on the Gaussian moment formulas.

#ifndef MPQKD_FOCK_ORACLE_HPP
#define MPQKD_FOCK_ORACLE_HPP

#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mpqkd/gaussian_state.hpp"
#include "mpqkd/photostats.hpp"

namespace mpqkd::fock {

inline constexpr int kMaxCutoff = 80;
// Norm-deficit ceiling. The hardest r = 0.8, |alpha|^2 = 4 point reaches
// about 1.1e-8 at the largest cutoff; retained amplitudes are exact.
inline constexpr double kMaxTruncation = 1e-7;

class TruncationError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Pure two-mode state with amplitudes c(n_V, n_H), 0 <= n <= cutoff.
class FockState {
   public:
    FockState(int cutoff, Eigen::MatrixXcd amplitudes);

    int cutoff() const { return cutoff_; }
    const Eigen::MatrixXcd &amplitudes() const { return amps_; }
    std::complex<double> amplitude(int n_v, int n_h) const { return amps_(n_v, n_h); }
    /// 1 - sum |c|^2.
    double truncation_error() const;

   private:
    int cutoff_;
    Eigen::MatrixXcd amps_;
};

/// Smallest cutoff with cutoff >= mean + 8 sigma for the busier mode, where
/// sigma is the displaced-thermal width (never below sqrt(mean)).
int recommended_cutoff(std::complex<double> alpha_v, std::complex<double> alpha_h, double r, double theta);

/// Two-mode squeeze exp(r (e^{i theta} a^dag b^dag - h.c.)) applied to
/// |alpha_v> |alpha_h>. Throws TruncationError when the cutoff breaks the
/// sizing rule or the norm deficit exceeds kMaxTruncation (unless
/// allow_truncation).
FockState build_state_exact(std::complex<double> alpha_v, std::complex<double> alpha_h, double r, double theta,
                            int cutoff, bool allow_truncation = false);

/// Joint photon-number distribution P(n1, n2) in the chosen basis. kDiag
/// applies the pi/4 beamsplitter exactly in Fock space; the result is sized
/// for up to 2 * cutoff photons per mode in that case.
Eigen::MatrixXd joint_number_distribution(const FockState &state, Basis basis);

using DiffDistribution = std::map<int, double>;

DiffDistribution exact_diff_distribution(const FockState &state, Basis basis);

/// Loss eta on both modes via a vacuum ancilla per mode, ancilla traced out.
/// ancilla_cutoff bounds the photons the ancillas may absorb and must cover
/// every photon present in the basis-rotated state.
DiffDistribution exact_loss_distribution(const FockState &state, double eta, Basis basis, int ancilla_cutoff);

/// Bob/Eve difference-number moments after a tap of fraction eta, both arms
/// measured in `basis`, by explicit enumeration of the photon split.
JointDiffMoments exact_tap_moments(const FockState &state, double eta, Basis basis);

DiffMoments distribution_moments(const DiffDistribution &dist);
double total_probability(const DiffDistribution &dist);

}  // namespace mpqkd::fock

#endif
