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

// Norm-based screening: drop the b largest-norm inputs, average the rest.
// Also exposes the deviation bound
//
//   ||G - S|| <= 2a/(1-b') ||S|| + max_{i honest} ||g_i - S||
//
// (a = byzantine fraction, b' = screened fraction) as a checkable predicate.

#pragma once

#include "robustdl/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace robustdl {

template <typename Scalar>
using GradientSet = std::vector<Vector<Scalar>>;

struct ScreenConfig {
  std::size_t screen_count = 0;  // b: number of largest-norm inputs removed

  double beta(std::size_t m) const { return static_cast<double>(screen_count) / static_cast<double>(m); }
};

template <typename Scalar>
struct DeviationBound {
  Scalar c_alpha{};  // 2a / (1 - beta)
  Scalar delta{};    // max honest distance to S
  Scalar rhs{};
};

template <typename Scalar>
struct ScreeningCheck {
  bool holds = false;
  Scalar lhs{};
  Scalar rhs{};
  Scalar slack{};  // rhs - lhs
};

/// Relative allowance for floating-point roundoff when comparing a measured
/// deviation against a bound that can be attained with equality.
inline constexpr double kBoundRoundoff = 1e-12;

/// Throws StructuralError unless all vectors are non-empty and share one dimension.
template <typename Scalar>
Eigen::Index validate_gradient_set(const GradientSet<Scalar>& g) {
  if (g.empty()) throw StructuralError("gradient set is empty");
  const Eigen::Index d = g.front().size();
  if (d < 1) throw StructuralError("gradient dimension must be >= 1");
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (g[i].size() != d) {
      throw StructuralError("gradient " + std::to_string(i) + " has dimension " + std::to_string(g[i].size()) +
                            ", expected " + std::to_string(d));
    }
  }
  return d;
}

/// Input indices ordered by ascending L2 norm; equal norms keep ascending index.
template <typename Scalar>
std::vector<std::size_t> norm_order(const GradientSet<Scalar>& g) {
  std::vector<Scalar> norms(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) norms[i] = g[i].norm();
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] < norms[b]; });
  return order;
}

/// Indices of the m - b inputs that survive screening, in norm order.
template <typename Scalar>
std::vector<std::size_t> screened_indices(const GradientSet<Scalar>& g, const ScreenConfig& cfg) {
  validate_gradient_set(g);
  if (cfg.screen_count >= g.size()) {
    throw ConfigError("screen count b=" + std::to_string(cfg.screen_count) + " must be < m=" + std::to_string(g.size()));
  }
  auto order = norm_order(g);
  order.resize(g.size() - cfg.screen_count);
  return order;
}

/// Mean of the m - b smallest-norm inputs. Summation runs over the kept
/// inputs in norm order, so the result is bit-stable under permutations of
/// tie-free inputs.
template <typename Scalar>
Vector<Scalar> norm_screen(const GradientSet<Scalar>& g, const ScreenConfig& cfg) {
  const auto kept = screened_indices(g, cfg);
  Vector<Scalar> sum = Vector<Scalar>::Zero(g.front().size());
  for (std::size_t i : kept) sum += g[i];
  return sum / static_cast<Scalar>(kept.size());
}

/// Plain average in index order; the aggregation used when screening is disabled.
template <typename Scalar>
Vector<Scalar> mean_aggregate(const GradientSet<Scalar>& g) {
  validate_gradient_set(g);
  Vector<Scalar> sum = Vector<Scalar>::Zero(g.front().size());
  for (const auto& v : g) sum += v;
  return sum / static_cast<Scalar>(g.size());
}

/// Right-hand side of the screening deviation bound for reference vector S.
/// Throws BoundInapplicableError when the byzantine fraction exceeds the
/// screened fraction or one half.
template <typename Scalar>
DeviationBound<Scalar> screening_rhs(const GradientSet<Scalar>& g, const std::set<std::size_t>& honest_idx,
                                    const ScreenConfig& cfg, const Vector<Scalar>& S) {
  const Eigen::Index d = validate_gradient_set(g);
  const std::size_t m = g.size();
  if (S.size() != d) throw StructuralError("reference vector dimension mismatch");
  if (honest_idx.empty()) throw ConfigError("honest index set is empty");
  if (*honest_idx.rbegin() >= m) throw ConfigError("honest index out of range");
  if (cfg.screen_count >= m) throw ConfigError("screen count must be < m");

  const std::size_t byzantine = m - honest_idx.size();
  // Compare in integers: alpha <= beta  <=>  |B| <= b ;  alpha <= 1/2  <=>  2|B| <= m.
  if (byzantine > cfg.screen_count) {
    throw BoundInapplicableError("byzantine count " + std::to_string(byzantine) + " exceeds screen count " +
                                 std::to_string(cfg.screen_count));
  }
  if (2 * byzantine > m) throw BoundInapplicableError("byzantine fraction exceeds 1/2");

  const Scalar alpha = static_cast<Scalar>(byzantine) / static_cast<Scalar>(m);
  const Scalar beta = static_cast<Scalar>(cfg.screen_count) / static_cast<Scalar>(m);

  DeviationBound<Scalar> out;
  out.c_alpha = Scalar(2) * alpha / (Scalar(1) - beta);
  out.delta = Scalar(0);
  for (std::size_t i : honest_idx) out.delta = std::max(out.delta, Scalar((g[i] - S).norm()));
  out.rhs = out.c_alpha * S.norm() + out.delta;
  return out;
}

template <typename Scalar>
ScreeningCheck<Scalar> check_screening_bound(const GradientSet<Scalar>& g, const std::set<std::size_t>& honest_idx,
                                      const ScreenConfig& cfg, const Vector<Scalar>& S) {
  const auto bound = screening_rhs(g, honest_idx, cfg, S);
  ScreeningCheck<Scalar> out;
  out.lhs = (norm_screen(g, cfg) - S).norm();
  out.rhs = bound.rhs;
  out.slack = out.rhs - out.lhs;
  out.holds = out.lhs <= out.rhs + Scalar(kBoundRoundoff) * std::max(Scalar(1), out.rhs);
  return out;
}

}  // namespace robustdl
