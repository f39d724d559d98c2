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

// Synchronous parameter-server simulation of distributionally and
// byzantine-robust distributed gradient descent. Each round the server
// broadcasts theta_t; honest workers average envelope gradients of the robust
// surrogate over their shard, byzantine workers substitute crafted gradients,
// and the server steps along the norm-screened aggregate.

#pragma once

#include "robustdl/aggregation.hpp"
#include "robustdl/attacks.hpp"
#include "robustdl/data.hpp"
#include "robustdl/dro.hpp"
#include "robustdl/losses.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace robustdl {

struct WorkerRoster {
  std::size_t workers = 1;
  std::size_t shard_size = 0;
  std::vector<std::size_t> byzantine;  // sorted worker indices
  AttackSpec attack;
  // Permits byzantine count > screen count, for breakpoint demonstrations
  // and the non-screening baselines.
  bool allow_breakpoint = false;

  /// Byzantine workers take the lowest indices 0 .. byzantine_count - 1.
  static WorkerRoster even_split(std::size_t samples, std::size_t workers, std::size_t byzantine_count,
                                 const AttackSpec& attack = {});

  bool is_byzantine(std::size_t worker) const;
  std::vector<std::size_t> honest() const;
  std::size_t begin(std::size_t worker) const { return worker * shard_size; }
  std::size_t end(std::size_t worker) const { return (worker + 1) * shard_size; }
  double alpha() const { return static_cast<double>(byzantine.size()) / static_cast<double>(workers); }

  void validate(std::size_t samples, const ScreenConfig& screen) const;
};

/// Server-side diagnostics computed from every sample with high-precision
/// inner solves. Never used in the update.
struct DiagnosticsConfig {
  bool enabled = false;
  int precision_t_z = 200;
};

struct TrainConfig {
  LossModel model = LossModel::logistic();
  double eta = 1.0;
  int iterations = 300;
  DROConfig dro;
  ScreenConfig screen;
  std::uint64_t seed = 0;
  VectorXd theta0;  // empty: seeded N(0, 1) * 0.01
  int snapshot_every = 0;
  // Objective-level ridge (mu/2)||theta||^2, for strongly convex diagnostics.
  double ridge = 0.0;
  // When set, per-round t_z comes from required_iterations(schedule.eps_at(t)).
  std::optional<EpsilonSchedule> eps_schedule;
  SmoothnessConstants schedule_constants;
  double schedule_d_z = 1.0;
  DiagnosticsConfig diagnostics;

  void validate() const;
};

struct IterationDiagnostics {
  VectorXd theta;
  VectorXd true_gradient;  // grad F(theta_t)
  double true_objective = 0.0;
  double inner_error = 0.0;  // max over honest samples ||z_eps - z*||
  double sigma = 0.0;
};

struct IterationRecord {
  int t = 0;
  int t_z = 0;
  VectorXd aggregated;
  double aggregated_norm = 0.0;
  double objective_estimate = 0.0;  // mean inner objective over honest samples
  std::vector<double> worker_grad_norms;
  std::optional<VectorXd> theta;  // snapshot of theta_t
  std::optional<IterationDiagnostics> diagnostics;
};

struct RunTrace {
  std::vector<IterationRecord> iterations;
  VectorXd theta0;
  VectorXd theta_final;
  std::vector<std::size_t> byzantine;
  std::size_t workers = 0;
  std::size_t screen_count = 0;
};

enum class Algorithm { kAlg2, kDroOnly, kNbsOnly, kErm };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

/// Seeded N(0, 1) * 0.01 initialization shared by every variant with the same seed.
VectorXd initial_theta(Eigen::Index dim, std::uint64_t seed);

/// (1/n) sum_j grad_theta f(theta; z_j^eps) over rows [begin, end).
VectorXd worker_local_gradient(const Dataset& data, std::size_t begin, std::size_t end, const LossModel& model,
                               const VectorXd& theta, const DROConfig& dro);

RunTrace run_training(const Dataset& data, const WorkerRoster& roster, const TrainConfig& cfg);

/// alg2: as configured. dro_only: plain mean (b = 0). nbs_only: t_z = 0.
/// erm: both.
RunTrace run_variant(Algorithm algorithm, const Dataset& data, const WorkerRoster& roster, const TrainConfig& cfg);

/// Applies the variant's overrides without running.
std::pair<WorkerRoster, TrainConfig> variant_setup(Algorithm algorithm, const WorkerRoster& roster,
                                                   const TrainConfig& cfg);

struct SurrogateEvaluation {
  double objective = 0.0;
  VectorXd gradient;
  double sigma = 0.0;
};

/// F(theta), grad F(theta), and the spread sigma using high-precision inner
/// maximizers for every sample.
SurrogateEvaluation evaluate_surrogate(const Dataset& data, const LossModel& model, const VectorXd& theta,
                                       double lambda, int precision_t_z, double ridge = 0.0);

/// max_k || grad_theta f(theta; z_k*) - mean_j grad_theta f(theta; z_j*) ||.
double measure_sigma(const Dataset& data, const LossModel& model, const VectorXd& theta, const DROConfig& dro,
                     int precision_t_z);

}  // namespace robustdl
