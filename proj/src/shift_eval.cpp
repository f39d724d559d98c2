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

#include "robustdl/shift_eval.hpp"

#include "robustdl/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace robustdl {

void ShiftSpec::validate() const {
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw ConfigError("shift budget must be >= 0");
  if (ascent_steps < 0) throw ConfigError("shift ascent steps must be >= 0");
  if (!std::isfinite(step_size)) throw ConfigError("shift step size must be finite");
}

std::string to_string(ShiftSpec::Norm n) { return n == ShiftSpec::Norm::kL1 ? "L1" : "L2"; }

ShiftSpec::Norm shift_norm_from_string(const std::string& s) {
  if (s == "L1" || s == "l1") return ShiftSpec::Norm::kL1;
  if (s == "L2" || s == "l2") return ShiftSpec::Norm::kL2;
  throw ConfigError("unknown shift norm '" + s + "'");
}

VectorXd project_l2_ball(const VectorXd& z, const VectorXd& center, double radius) {
  VectorXd d = z - center;
  const double n = d.norm();
  if (n > radius) d *= radius / n;
  return center + d;
}

VectorXd project_l1_ball(const VectorXd& z, const VectorXd& center, double radius) {
  const VectorXd d = z - center;
  if (d.lpNorm<1>() <= radius) return z;
  if (radius <= 0.0) return center;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(d[a]) > std::abs(d[b]); });

  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const double u = std::abs(d[order[j]]);
    cumulative += u;
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (u - candidate > 0.0) tau = candidate;
  }
  VectorXd out = center;
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    const double mag = std::max(std::abs(d[k]) - tau, 0.0);
    out[k] += d[k] < 0.0 ? -mag : mag;
  }
  return out;
}

VectorXd steepest_ascent_direction(const VectorXd& g, ShiftSpec::Norm norm) {
  VectorXd dir = VectorXd::Zero(g.size());
  if (norm == ShiftSpec::Norm::kL2) {
    const double n = g.norm();
    if (n > 0.0) dir = g / n;
    return dir;
  }
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < g.size(); ++k) {
    if (std::abs(g[k]) > std::abs(g[best])) best = k;
  }
  if (g.size() > 0 && g[best] != 0.0) dir[best] = g[best] > 0.0 ? 1.0 : -1.0;
  return dir;
}

namespace {

VectorXd project(const VectorXd& z, const VectorXd& x, const ShiftSpec& spec) {
  return spec.norm == ShiftSpec::Norm::kL2 ? project_l2_ball(z, x, spec.budget) : project_l1_ball(z, x, spec.budget);
}

}  // namespace

VectorXd perturb_sample(const VectorXd& theta, const VectorXd& x, double y, const ShiftSpec& spec,
                        const VectorXd& start) {
  if (spec.budget == 0.0) return x;
  const LossModel model = LossModel::logistic();
  VectorXd z = project(start, x, spec);
  VectorXd best = z;
  double best_loss = loss_value(model, theta, z, y);
  const double step = spec.effective_step();
  for (int s = 0; s < spec.ascent_steps; ++s) {
    const VectorXd dir = steepest_ascent_direction(grad_z(model, theta, z, y), spec.norm);
    if (dir.isZero(0.0)) break;
    z = project(z + step * dir, x, spec);
    if (!z.allFinite()) throw NumericError("test-shift ascent produced a non-finite point");
    const double l = loss_value(model, theta, z, y);
    if (l > best_loss) {
      best_loss = l;
      best = z;
    }
  }
  return best;
}

Dataset perturb_test_set(const VectorXd& theta, const Dataset& test, const ShiftSpec& spec) {
  return perturb_test_set(theta, test, spec, test);
}

Dataset perturb_test_set(const VectorXd& theta, const Dataset& test, const ShiftSpec& spec, const Dataset& warm_start) {
  spec.validate();
  if (theta.size() != test.dim()) throw StructuralError("model and test features differ in dimension");
  if (warm_start.size() != test.size() || warm_start.dim() != test.dim()) {
    throw StructuralError("warm start does not match the test set");
  }
  Dataset out = test;
  if (spec.budget == 0.0) return out;
  for (std::size_t j = 0; j < test.size(); ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    out.features.row(row) = perturb_sample(theta, test.sample(j), test.label(j), spec, warm_start.sample(j)).transpose();
  }
  return out;
}

std::vector<Dataset> perturb_budget_sweep(const VectorXd& theta, const Dataset& test, ShiftSpec spec,
                                          const std::vector<double>& budgets) {
  if (!std::is_sorted(budgets.begin(), budgets.end())) throw ConfigError("budget grid must be ascending");
  std::vector<Dataset> out;
  out.reserve(budgets.size());
  const Dataset* previous = &test;
  for (double q : budgets) {
    spec.budget = q;
    out.push_back(perturb_test_set(theta, test, spec, *previous));
    previous = &out.back();
  }
  return out;
}

double misclassification_rate(const VectorXd& theta, const Dataset& samples) {
  if (samples.size() == 0) return 0.0;
  if (theta.size() != samples.dim()) throw StructuralError("model and samples differ in dimension");
  std::size_t wrong = 0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const double s = samples.features.row(static_cast<Eigen::Index>(j)).dot(theta);
    const double predicted = sigmoid(s) >= 0.5 ? 1.0 : 0.0;
    if (predicted != samples.label(j)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(samples.size());
}

double average_loss(const VectorXd& theta, const Dataset& samples) {
  if (samples.size() == 0) return 0.0;
  const LossModel model = LossModel::logistic();
  double total = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) total += loss_value(model, theta, samples.sample(j), samples.label(j));
  return total / static_cast<double>(samples.size());
}

}  // namespace robustdl
