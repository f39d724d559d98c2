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

// Test-time shifts: each test feature vector moves inside an L1 or L2 ball of
// radius q to increase the cross-entropy of a fixed logistic model; labels
// stay put.

#pragma once

#include "robustdl/data.hpp"
#include "robustdl/types.hpp"

#include <string>
#include <vector>

namespace robustdl {

struct ShiftSpec {
  enum class Norm { kL1, kL2 };

  Norm norm = Norm::kL1;
  double budget = 0.0;    // q; 0 means clean evaluation
  int ascent_steps = 20;
  double step_size = 0.0;  // <= 0 selects 2.5 q / ascent_steps

  double effective_step() const { return step_size > 0.0 ? step_size : 2.5 * budget / ascent_steps; }
  void validate() const;

  bool operator==(const ShiftSpec&) const = default;
};

std::string to_string(ShiftSpec::Norm n);
ShiftSpec::Norm shift_norm_from_string(const std::string& s);

/// Euclidean projection of z onto {z : ||z - center||_2 <= radius}.
VectorXd project_l2_ball(const VectorXd& z, const VectorXd& center, double radius);

/// Euclidean projection onto the L1 ball via the sorted-threshold rule
/// (largest-magnitude first; equal magnitudes ordered by coordinate index).
VectorXd project_l1_ball(const VectorXd& z, const VectorXd& center, double radius);

/// Unit-norm steepest ascent direction for gradient g in the given norm:
/// L2 -> g / ||g||, L1 -> sign(g_k) e_k for the first k maximizing |g_k|.
VectorXd steepest_ascent_direction(const VectorXd& g, ShiftSpec::Norm norm);

/// Projected steepest ascent on the cross-entropy starting from `start`
/// (which must lie in the ball around x). Returns the best iterate seen, so
/// the loss never drops below the loss at `start`.
VectorXd perturb_sample(const VectorXd& theta, const VectorXd& x, double y, const ShiftSpec& spec,
                        const VectorXd& start);

Dataset perturb_test_set(const VectorXd& theta, const Dataset& test, const ShiftSpec& spec);

/// As perturb_test_set, warm-started from a previous (smaller budget) solution.
Dataset perturb_test_set(const VectorXd& theta, const Dataset& test, const ShiftSpec& spec, const Dataset& warm_start);

/// Shifted test sets for an ascending budget grid, each warm-started from the
/// previous budget's solution.
std::vector<Dataset> perturb_budget_sweep(const VectorXd& theta, const Dataset& test, ShiftSpec spec,
                                          const std::vector<double>& budgets);

/// Fraction of samples whose prediction (sigmoid(theta^T z) >= 1/2 -> 1) differs from the label.
double misclassification_rate(const VectorXd& theta, const Dataset& samples);

/// Mean logistic cross-entropy.
double average_loss(const VectorXd& theta, const Dataset& samples);

}  // namespace robustdl
