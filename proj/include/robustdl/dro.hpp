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

// Wasserstein robust surrogate with fixed dual variable lambda and transport
// cost c(z, x) = 1/2 ||z - x||^2:
//
//   phi(theta; x) = sup_z  f(theta; z) - lambda * c(z, x)
//
// The inner sup is solved by gradient ascent started at z = x; the surrogate
// gradient is grad_theta f evaluated at the ascent output (envelope theorem).

#pragma once

#include "robustdl/losses.hpp"
#include "robustdl/types.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace robustdl {

/// Smoothness constant of the transport cost in z. The fixed cost 1/2||z-x||^2
/// is 1-strongly convex and 1-smooth.
inline constexpr double kTransportSmoothness = 1.0;

struct DROConfig {
  double lambda = 3.0;  // dual variable
  double eta_z = 0.05;  // ascent step
  int t_z = 10;         // ascent iterations; 0 leaves z = x

  void validate() const {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
    if (!(eta_z > 0.0)) throw ConfigError("eta_z must be > 0");
    if (t_z < 0) throw ConfigError("t_z must be >= 0");
  }

  bool operator==(const DROConfig&) const = default;
};

template <typename Scalar>
struct AscentReport {
  Vector<Scalar> z_final;
  int iterations = 0;
  std::vector<Scalar> objective_trace;  // g(z_0), ..., g(z_T)
};

/// g(z) = f(theta; z) - lambda/2 ||z - x||^2
template <typename Scalar>
Scalar inner_objective(const LossModel& model, const Vector<Scalar>& theta, const Vector<Scalar>& x, Scalar y,
                       Scalar lambda, const Vector<Scalar>& z) {
  return loss_value(model, theta, z, y) - Scalar(0.5) * lambda * (z - x).squaredNorm();
}

template <typename Scalar>
Vector<Scalar> inner_gradient(const LossModel& model, const Vector<Scalar>& theta, const Vector<Scalar>& x, Scalar y,
                              Scalar lambda, const Vector<Scalar>& z) {
  return grad_z(model, theta, z, y) - lambda * (z - x);
}

/// Runs exactly cfg.t_z ascent steps from z_0 = x. Only features move; the
/// label is carried through.
template <typename Scalar>
AscentReport<Scalar> inner_maximize(const LossModel& model, const Vector<Scalar>& theta, const Vector<Scalar>& x,
                                    Scalar y, const DROConfig& cfg, bool record_objective = true) {
  cfg.validate();
  const Scalar lambda = Scalar(cfg.lambda);
  const Scalar step = Scalar(cfg.eta_z);
  AscentReport<Scalar> out;
  out.z_final = x;
  if (record_objective) {
    out.objective_trace.reserve(static_cast<std::size_t>(cfg.t_z) + 1);
    out.objective_trace.push_back(inner_objective(model, theta, x, y, lambda, out.z_final));
  }
  for (int t = 0; t < cfg.t_z; ++t) {
    out.z_final += step * inner_gradient(model, theta, x, y, lambda, out.z_final);
    if (!out.z_final.allFinite()) {
      throw NumericError("inner ascent diverged at iteration " + std::to_string(t));
    }
    if (record_objective) out.objective_trace.push_back(inner_objective(model, theta, x, y, lambda, out.z_final));
  }
  out.iterations = cfg.t_z;
  return out;
}

/// Envelope gradient of the surrogate at theta.
template <typename Scalar>
Vector<Scalar> surrogate_gradient(const LossModel& model, const Vector<Scalar>& theta, const Vector<Scalar>& x,
                                  Scalar y, const DROConfig& cfg) {
  const auto report = inner_maximize(model, theta, x, y, cfg, false);
  return grad_theta(model, theta, report.z_final, y);
}

/// Surrogate value g(z_final); a lower bound on phi that is tight as z_final -> z*.
template <typename Scalar>
Scalar surrogate_value(const LossModel& model, const Vector<Scalar>& theta, const Vector<Scalar>& x, Scalar y,
                       const DROConfig& cfg) {
  const auto report = inner_maximize(model, theta, x, y, cfg, false);
  return inner_objective(model, theta, x, y, Scalar(cfg.lambda), report.z_final);
}

/// Step 2 / (lambda L_c + lambda): the step with the best linear rate when the
/// inner objective is (lambda L_c + L_zz)-smooth and (lambda - L_zz)-strongly concave.
inline double theoretical_ascent_step(double lambda, double l_c = kTransportSmoothness) {
  return 2.0 / (lambda * l_c + lambda);
}

/// Closed-form maximizer for the quadratic family:
///   z* = (lambda x - c theta) / (lambda - c),  valid for lambda > c.
template <typename Scalar>
Vector<Scalar> exact_maximizer(const LossModel& model, const Vector<Scalar>& theta, const Vector<Scalar>& x,
                               Scalar lambda) {
  if (model.kind != LossModel::Kind::kQuadratic) {
    throw ConfigError("closed-form maximizer only exists for the quadratic family");
  }
  const Scalar c = Scalar(model.curvature);
  if (!(lambda > c)) throw RegimeError("lambda must exceed the curvature for a bounded inner problem");
  return (lambda * x - c * theta) / (lambda - c);
}

/// High-precision maximizer: closed form for the quadratic family, otherwise
/// `iterations` ascent steps at the theoretical step size.
template <typename Scalar>
Vector<Scalar> precise_maximizer(const LossModel& model, const Vector<Scalar>& theta, const Vector<Scalar>& x,
                                 Scalar y, double lambda, int iterations) {
  if (model.kind == LossModel::Kind::kQuadratic) return exact_maximizer(model, theta, x, Scalar(lambda));
  DROConfig cfg{lambda, theoretical_ascent_step(lambda), iterations};
  return inner_maximize(model, theta, x, y, cfg, false).z_final;
}

struct IterationRequirement {
  int iterations = 0;
  double p = 0.0;  // per-step contraction factor
};

/// Ascent iterations needed to reach distance eps of z* from distance d_z at
/// the theoretical step:
///   p = (2 L_zz + lambda L_c - lambda) / (lambda L_c + lambda),
///   T_z = ceil( ln(d_z / eps) / ln(1 / p) ).
inline IterationRequirement required_iterations(const SmoothnessConstants& k, double lambda, double l_c, double eps,
                                                double d_z) {
  if (!(lambda > k.zz)) throw RegimeError("lambda must exceed L_zz");
  if (!(eps > 0.0) || !(d_z > 0.0)) throw ConfigError("eps and d_z must be positive");
  IterationRequirement out;
  out.p = (2.0 * k.zz + lambda * l_c - lambda) / (lambda * l_c + lambda);
  if (!(out.p > 0.0) || !(out.p < 1.0)) {
    throw RegimeError("contraction factor p=" + std::to_string(out.p) + " outside (0, 1)");
  }
  if (eps >= d_z) return out;
  const double ratio = std::log(d_z / eps) / std::log(1.0 / out.p);
  // Absorb log roundoff so exact powers (d_z/eps = p^-k) give k, not k + 1.
  out.iterations = static_cast<int>(std::ceil(ratio - 1e-9));
  return out;
}

/// Two-stage precision: eps_coarse for t < phase_boundary, eps_fine after.
struct EpsilonSchedule {
  int phase_boundary = 0;
  double eps_coarse = 1e-1;
  double eps_fine = 1e-3;

  void validate() const {
    if (!(eps_fine > 0.0) || !(eps_coarse >= eps_fine)) {
      throw ConfigError("epsilon schedule requires eps_coarse >= eps_fine > 0");
    }
  }

  double eps_at(int t) const { return t < phase_boundary ? eps_coarse : eps_fine; }

  bool operator==(const EpsilonSchedule&) const = default;
};

}  // namespace robustdl
