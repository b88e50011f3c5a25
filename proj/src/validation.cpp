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

#include "mpqkd/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "mpqkd/fock_oracle.hpp"
#include "mpqkd/photostats.hpp"

namespace mpqkd {

namespace {

using cd = std::complex<double>;
constexpr double kTheta = std::numbers::pi / 2;
// Headroom above the sizing rule so truncation stays far below the tolerance.
constexpr int kCutoffMargin = 12;

struct Point {
    cd alpha_v;
    cd alpha_h;
    double r;
    double alpha_sq;
    double eta;
    Basis basis;
};

double relative_error(double engine, double oracle) {
    return std::abs(engine - oracle) / std::max(std::abs(oracle), 1.0);
}

int cutoff_for(const Point &p) {
    return std::min(fock::kMaxCutoff, fock::recommended_cutoff(p.alpha_v, p.alpha_h, p.r, kTheta) + kCutoffMargin);
}

GaussianState engine_state(const Point &p) {
    return apply_two_mode_squeeze(make_coherent_seed(p.alpha_v, p.alpha_h), p.r, kTheta);
}

ValidationRow make_row(const Point &p, const std::string &quantity, int cutoff) {
    ValidationRow row;
    row.r = p.r;
    row.alpha_sq = p.alpha_sq;
    row.eta = p.eta;
    row.basis = p.basis;
    row.quantity = quantity;
    row.cutoff = cutoff;
    return row;
}

void finish(ValidationRow &row, double engine, double oracle, double tol) {
    row.engine = engine;
    row.oracle = oracle;
    row.rel_error = relative_error(engine, oracle);
    row.pass = row.rel_error <= tol;
}

void moment_rows(const Point &p, const ValidationOptions &opt, std::vector<ValidationRow> &rows) {
    const int cutoff = cutoff_for(p);
    auto mean_row = make_row(p, "mean", cutoff);
    auto var_row = make_row(p, "variance", cutoff);
    try {
        const auto engine = diff_number_moments(apply_loss(engine_state(p), p.eta), p.basis);
        const auto fock_state = fock::build_state_exact(p.alpha_v, p.alpha_h, p.r, kTheta, cutoff);
        const auto dist = p.eta == 0.0 ? fock::exact_diff_distribution(fock_state, p.basis)
                                       : fock::exact_loss_distribution(fock_state, p.eta, p.basis, 2 * cutoff);
        const auto oracle = fock::distribution_moments(dist);
        finish(mean_row, engine.mean, oracle.mean, opt.tolerance);
        finish(var_row, engine.variance * (1.0 + opt.variance_fault), oracle.variance, opt.tolerance);
    } catch (const std::exception &e) {
        mean_row.error = var_row.error = e.what();
    }
    rows.push_back(mean_row);
    rows.push_back(var_row);
}

void tap_rows(const Point &p, const ValidationOptions &opt, std::vector<ValidationRow> &rows) {
    const int cutoff = cutoff_for(p);
    auto row = make_row(p, "cov_be", cutoff);
    try {
        const auto engine = joint_diff_moments(tap_split(engine_state(p), p.eta), p.basis, p.basis);
        const auto fock_state = fock::build_state_exact(p.alpha_v, p.alpha_h, p.r, kTheta, cutoff);
        const auto oracle = fock::exact_tap_moments(fock_state, p.eta, p.basis);
        finish(row, engine.covariance, oracle.covariance, opt.tolerance);
    } catch (const std::exception &e) {
        row.error = e.what();
    }
    rows.push_back(row);
}

}  // namespace

bool ValidationResult::all_passed() const { return failures() == 0; }

size_t ValidationResult::failures() const {
    return static_cast<size_t>(std::count_if(rows.begin(), rows.end(), [](const auto &r) { return !r.pass; }));
}

ValidationResult run_validation(const ValidationOptions &options) {
    ValidationResult result;
    for (double r : options.r_values) {
        for (double a2 : options.alpha_sq_values) {
            const double a = std::sqrt(a2);
            for (double eta : options.eta_values) {
                for (Basis b : {Basis::kVH, Basis::kDiag}) {
                    moment_rows({cd(a, 0), cd(0, a), r, a2, eta, b}, options, result.rows);
                }
            }
        }
    }
    if (options.include_extra_rows) {
        // Real alpha_H: a nonzero DIAG mean whose sign pins the rotation direction.
        for (double eta : {0.0, 0.5}) {
            moment_rows({cd(1.5, 0), cd(1.0, 0), 0.4, 3.25, eta, Basis::kDiag}, options, result.rows);
            moment_rows({cd(1.5, 0), cd(1.0, 0), 0.4, 3.25, eta, Basis::kVH}, options, result.rows);
        }
        for (Basis b : {Basis::kVH, Basis::kDiag}) {
            tap_rows({cd(std::sqrt(2.0), 0), cd(0, std::sqrt(2.0)), 0.5, 2.0, 0.5, b}, options, result.rows);
            tap_rows({cd(1.0, 0), cd(0, 1.0), 0.8, 1.0, 0.3, b}, options, result.rows);
        }
    }
    return result;
}

std::string validation_csv(const ValidationResult &result) {
    std::ostringstream out;
    out << "r,alpha_sq,eta,basis,quantity,cutoff,engine,oracle,rel_error,status\n";
    char buf[512];
    for (const auto &row : result.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s,%s,%d,%.17g,%.17g,%.17g,%s\n", row.r, row.alpha_sq,
                      row.eta, to_string(row.basis), row.quantity.c_str(), row.cutoff, row.engine, row.oracle,
                      row.rel_error, row.error.empty() ? (row.pass ? "pass" : "fail") : "error");
        out << buf;
    }
    return out.str();
}

}  // namespace mpqkd
