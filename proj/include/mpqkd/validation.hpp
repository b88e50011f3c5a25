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

#ifndef MPQKD_VALIDATION_HPP
#define MPQKD_VALIDATION_HPP

#include <string>
#include <vector>

#include "mpqkd/gaussian_state.hpp"

namespace mpqkd {

/// Comparison ladder between the Gaussian engine and the Fock oracle.
struct ValidationOptions {
    double tolerance = 1e-6;
    std::vector<double> r_values = {0.2, 0.5, 0.8};
    std::vector<double> alpha_sq_values = {1.0, 2.0, 4.0};
    std::vector<double> eta_values = {0.0, 0.5};
    /// Sign-sensitive rows (real alpha_H) and tap cross-covariance rows.
    bool include_extra_rows = true;
    /// Test hook: relative perturbation applied to the engine variance.
    double variance_fault = 0.0;
};

struct ValidationRow {
    double r = 0;
    double alpha_sq = 0;
    double eta = 0;
    Basis basis = Basis::kVH;
    std::string quantity;  // mean | variance | cov_be
    int cutoff = 0;
    double engine = 0;
    double oracle = 0;
    double rel_error = 0;  // |engine - oracle| / max(|oracle|, 1)
    bool pass = false;
    std::string error;  // non-empty when the oracle could not run
};

struct ValidationResult {
    std::vector<ValidationRow> rows;
    bool all_passed() const;
    size_t failures() const;
};

ValidationResult run_validation(const ValidationOptions &options = {});

/// r,alpha_sq,eta,basis,quantity,cutoff,engine,oracle,rel_error,status
std::string validation_csv(const ValidationResult &result);

}  // namespace mpqkd

#endif
