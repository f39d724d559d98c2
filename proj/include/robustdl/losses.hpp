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

#pragma once

#include "robustdl/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace robustdl {

/// Per-sample loss f(theta; z).
///
///  - kLogistic: cross-entropy of sigmoid(theta^T z) against y in {0, 1}; no bias
///    term (append a constant feature to the data instead).
///  - kQuadratic: (c/2) ||theta - z||^2 with curvature c > 0; labels ignored.
///    All four smoothness constants equal c exactly, which makes it the test
///    family for bound checks.
struct LossModel {
  enum class Kind { kLogistic, kQuadratic };

  Kind kind = Kind::kLogistic;
  double curvature = 1.0;

  static LossModel logistic() { return {Kind::kLogistic, 1.0}; }
  static LossModel quadratic(double c = 1.0) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("quadratic curvature must be positive and finite");
    return {Kind::kQuadratic, c};
  }

  bool operator==(const LossModel&) const = default;
};

inline std::string to_string(LossModel::Kind k) {
  return k == LossModel::Kind::kLogistic ? "logistic" : "quadratic";
}

/// Lipschitz constants of the four gradient blocks. `estimate` marks upper
/// bounds derived from data/parameter norms rather than exact values.
struct SmoothnessConstants {
  double tt = 0.0;
  double tz = 0.0;
  double zt = 0.0;
  double zz = 0.0;
  bool estimate = false;
};

inline constexpr double kProbabilityClamp = 1e-12;

/// Numerically stable logistic sigmoid.
template <typename Scalar>
Scalar sigmoid(Scalar s) {
  if (s >= Scalar(0)) {
    return Scalar(1) / (Scalar(1) + std::exp(-s));
  }
  const Scalar e = std::exp(s);
  return e / (Scalar(1) + e);
}

/// log(1 + exp(s)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar s) {
  return s > Scalar(0) ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

namespace detail {

template <typename Scalar>
void check_args(const Vector<Scalar>& theta, const Vector<Scalar>& z, Scalar y, const LossModel& model) {
  if (theta.size() != z.size()) {
    throw StructuralError("theta has dimension " + std::to_string(theta.size()) + " but z has " +
                          std::to_string(z.size()));
  }
  if (!theta.allFinite() || !z.allFinite()) throw NumericError("non-finite loss argument");
  if (model.kind == LossModel::Kind::kLogistic && y != Scalar(0) && y != Scalar(1)) {
    throw ConfigError("logistic label must be 0 or 1");
  }
}

}  // namespace detail

template <typename Scalar>
Scalar loss_value(const LossModel& model, const Vector<Scalar>& theta, const Vector<Scalar>& z, Scalar y) {
  detail::check_args(theta, z, y, model);
  if (model.kind == LossModel::Kind::kQuadratic) {
    return Scalar(0.5 * model.curvature) * (theta - z).squaredNorm();
  }
  const Scalar s = theta.dot(z);
  const Scalar a = sigmoid(s);
  const Scalar lo = Scalar(kProbabilityClamp);
  const Scalar hi = Scalar(1) - lo;
  Scalar log_a, log_1ma;
  if (a >= lo && a <= hi) {
    log_a = -softplus(-s);
    log_1ma = -softplus(s);
  } else {
    const Scalar ac = std::clamp(a, lo, hi);
    log_a = std::log(ac);
    log_1ma = std::log(Scalar(1) - ac);
  }
  return -y * log_a - (Scalar(1) - y) * log_1ma;
}

template <typename Scalar>
Vector<Scalar> grad_theta(const LossModel& model, const Vector<Scalar>& theta, const Vector<Scalar>& z, Scalar y) {
  detail::check_args(theta, z, y, model);
  if (model.kind == LossModel::Kind::kQuadratic) {
    return Scalar(model.curvature) * (theta - z);
  }
  return (sigmoid(Scalar(theta.dot(z))) - y) * z;
}

template <typename Scalar>
Vector<Scalar> grad_z(const LossModel& model, const Vector<Scalar>& theta, const Vector<Scalar>& z, Scalar y) {
  detail::check_args(theta, z, y, model);
  if (model.kind == LossModel::Kind::kQuadratic) {
    return Scalar(model.curvature) * (z - theta);
  }
  return (sigmoid(Scalar(theta.dot(z))) - y) * theta;
}

/// Smoothness constants. Quadratic: exact. Logistic: upper bounds over
/// ||z|| <= data_bound and ||theta|| <= theta_bound, using sigmoid' <= 1/4
/// (L_tz, L_zt pick up the (a - y) identity term, bounded by 1).
inline SmoothnessConstants constants(const LossModel& model, double data_bound, double theta_bound = 0.0) {
  if (model.kind == LossModel::Kind::kQuadratic) {
    const double c = model.curvature;
    return {c, c, c, c, false};
  }
  SmoothnessConstants k;
  k.tt = 0.25 * data_bound * data_bound;
  k.zz = 0.25 * theta_bound * theta_bound;
  k.tz = 1.0 + 0.25 * data_bound * theta_bound;
  k.zt = k.tz;
  k.estimate = true;
  return k;
}

}  // namespace robustdl
