/*
 * Copyright 2026 The robustdl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Closed-form convergence quantities for robust distributed gradient descent
// and checkers that hold them against recorded traces.
//
// Notation: C_a = 2a/(1-b) (a byzantine fraction, b screened fraction),
// Delta = L_tz * eps + sigma, L_F = L_tt + L_tz L_zt / (lambda - L_zz).

#pragma once

#include "robustdl/losses.hpp"
#include "robustdl/simulation.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace robustdl {

struct TheoryInputs {
  SmoothnessConstants constants;
  double lambda = 3.0;
  double lambda_f = 0.0;  // strong-convexity modulus of F; 0 when unused
  double alpha = 0.0;
  double beta = 0.0;
  double eps = 0.0;
  double sigma = 0.0;
  std::optional<double> r;  // free parameter in (0, ((1-b)/(2a))^2 - 1); unset selects default_r
  double k = 1.0;  // trajectory factor: ||theta_t - theta*|| <= k ||theta_0 - theta*||
};

struct BoundReport {
  double bound_value = 0.0;
  double measured_value = 0.0;
  bool satisfied = false;  // measured <= bound, up to kBoundRoundoff relative
  double margin = 0.0;     // bound - measured
};

BoundReport make_report(double bound, double measured);

double c_alpha(double alpha, double beta);
double delta_term(const TheoryInputs& in);

/// L_F = L_tt + L_tz L_zt / (lambda - L_zz). RegimeError unless lambda > L_zz.
double lf_smooth(const SmoothnessConstants& k, double lambda);

/// C_a ||grad F|| + (L_tz eps + sigma).
double deviation_rhs(const TheoryInputs& in, double grad_norm);

/// Upper end of the admissible r interval; +inf when alpha = 0, <= 0 when C_a >= 1.
double r_upper(double alpha, double beta);

/// Midpoint of (0, r_upper) clipped to at most 10.
double default_r(double alpha, double beta);

/// Average squared gradient norm bound over T rounds at eta = 1/L_F.
double nonconvex_bound(const TheoryInputs& in, double f0_minus_fstar, int T);

/// Optimality-gap bound at eta = 1/L_F with D = k ||theta_0 - theta*||.
double convex_bound(const TheoryInputs& in, double theta0_dist, int T);

/// Distance-to-optimum bound at eta = 2/(L_F + lambda_F).
double strongly_convex_bound(const TheoryInputs& in, double theta0_dist, int T);

/// (2 L_F C_a + L_F - lambda_F) / (L_F + lambda_F).
double strongly_convex_contraction(const TheoryInputs& in);

/// 1 / (1 + 2 L_F / lambda_F): with beta = alpha, the largest byzantine fraction
/// (exclusive) for which the strongly convex contraction holds.
double strongly_convex_alpha_threshold(double l_f, double lambda_f);

/// Minimizer of the surrogate objective computed by a long clean
/// gradient-descent run at step 1/L_F.
struct ReferenceOptimum {
  VectorXd theta;
  double objective = 0.0;
  int iterations = 0;
};

struct ReferenceOptions {
  int max_iterations = 100000;
  double gradient_tolerance = 1e-13;  // early exit once ||grad F|| falls below
  int precision_t_z = 200;
  double ridge = 0.0;
};

ReferenceOptimum reference_optimum(const Dataset& data, const LossModel& model, double lambda, double l_f,
                                   const ReferenceOptions& opts = {});

/// Memoized reference_optimum keyed on the data bytes and parameters.
const ReferenceOptimum& cached_reference_optimum(const Dataset& data, const LossModel& model, double lambda,
                                                 double l_f, const ReferenceOptions& opts = {});

/// Theory inputs read off a diagnostics-enabled trace: alpha and beta from
/// the roster, eps and sigma as maxima over all rounds.
TheoryInputs theory_from_trace(const RunTrace& trace, const SmoothnessConstants& k, double lambda,
                               double lambda_f = 0.0);

/// Per-round deviation check ||G - grad F|| <= C_a ||grad F|| + L_tz eps_t + sigma_t.
std::vector<BoundReport> check_deviation(const RunTrace& trace, const SmoothnessConstants& k, double lambda);

/// (1/T) sum_t ||grad F(theta_t)||^2 against the nonconvex bound.
BoundReport check_nonconvex(const RunTrace& trace, const TheoryInputs& in, double f_star);

struct ConvexReport {
  BoundReport report;
  double measured_k = 1.0;
  bool vacuous = false;  // bound >= F(theta_0) - F*
};

/// F(theta_T) - F* against the convex bound; k is measured from the trace.
ConvexReport check_convex(const RunTrace& trace, TheoryInputs in, const ReferenceOptimum& opt,
                              double final_objective);

/// ||theta_T - theta*|| against the strongly convex bound.
BoundReport check_strongly_convex(const RunTrace& trace, const TheoryInputs& in, const VectorXd& theta_star);

}  // namespace robustdl
