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

#include "robustdl/simulation.hpp"

#include <algorithm>
#include <random>

namespace robustdl {

WorkerRoster WorkerRoster::even_split(std::size_t samples, std::size_t workers, std::size_t byzantine_count,
                                      const AttackSpec& attack) {
  if (workers < 1) throw ConfigError("worker count must be >= 1");
  if (workers > samples) throw ConfigError("more workers than samples");
  if (byzantine_count >= workers) throw ConfigError("at least one worker must be honest");
  WorkerRoster r;
  r.workers = workers;
  r.shard_size = samples / workers;
  if (samples % workers != 0) {
    log_warning("roster ignores " + std::to_string(samples % workers) + " tail samples for equal shards");
  }
  for (std::size_t i = 0; i < byzantine_count; ++i) r.byzantine.push_back(i);
  r.attack = attack;
  return r;
}

bool WorkerRoster::is_byzantine(std::size_t worker) const {
  return std::binary_search(byzantine.begin(), byzantine.end(), worker);
}

std::vector<std::size_t> WorkerRoster::honest() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < workers; ++i) {
    if (!is_byzantine(i)) out.push_back(i);
  }
  return out;
}

void WorkerRoster::validate(std::size_t samples, const ScreenConfig& screen) const {
  if (workers < 1) throw ConfigError("worker count must be >= 1");
  if (shard_size < 1) throw ConfigError("shards must be non-empty");
  if (workers * shard_size > samples) throw ConfigError("shards exceed the dataset");
  if (!std::is_sorted(byzantine.begin(), byzantine.end()) ||
      std::adjacent_find(byzantine.begin(), byzantine.end()) != byzantine.end()) {
    throw ConfigError("byzantine indices must be sorted and unique");
  }
  if (!byzantine.empty() && byzantine.back() >= workers) throw ConfigError("byzantine index out of range");
  if (byzantine.size() >= workers) throw ConfigError("at least one worker must be honest");
  if (screen.screen_count >= workers) throw ConfigError("screen count must be < worker count");
  if (!allow_breakpoint && byzantine.size() > screen.screen_count) {
    throw ConfigError("byzantine count " + std::to_string(byzantine.size()) + " exceeds screen count " +
                      std::to_string(screen.screen_count) + " (set allow_breakpoint to demonstrate breakdown)");
  }
  if (!byzantine.empty()) attack.validate();
}

void TrainConfig::validate() const {
  if (!(eta > 0.0)) throw ConfigError("learning rate must be > 0");
  if (iterations < 1) throw ConfigError("iteration count must be >= 1");
  if (snapshot_every < 0) throw ConfigError("snapshot cadence must be >= 0");
  if (ridge < 0.0) throw ConfigError("ridge must be >= 0");
  if (diagnostics.enabled && diagnostics.precision_t_z < 1) throw ConfigError("precision_t_z must be >= 1");
  dro.validate();
  if (eps_schedule) eps_schedule->validate();
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kAlg2: return "alg2";
    case Algorithm::kDroOnly: return "dro_only";
    case Algorithm::kNbsOnly: return "nbs_only";
    case Algorithm::kErm: return "erm";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "alg2") return Algorithm::kAlg2;
  if (s == "dro_only") return Algorithm::kDroOnly;
  if (s == "nbs_only") return Algorithm::kNbsOnly;
  if (s == "erm") return Algorithm::kErm;
  throw ConfigError("unknown variant '" + s + "'");
}

VectorXd initial_theta(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd theta(dim);
  for (Eigen::Index i = 0; i < dim; ++i) theta[i] = 0.01 * normal(rng);
  return theta;
}

VectorXd worker_local_gradient(const Dataset& data, std::size_t begin, std::size_t end, const LossModel& model,
                               const VectorXd& theta, const DROConfig& dro) {
  if (begin >= end || end > data.size()) throw ConfigError("worker shard is empty or out of range");
  VectorXd sum = VectorXd::Zero(theta.size());
  for (std::size_t j = begin; j < end; ++j) {
    try {
      sum += surrogate_gradient(model, theta, data.sample(j), data.label(j), dro);
    } catch (const NumericError& e) {
      throw NumericError("sample " + std::to_string(j) + ": " + e.what());
    }
  }
  return sum / static_cast<double>(end - begin);
}

SurrogateEvaluation evaluate_surrogate(const Dataset& data, const LossModel& model, const VectorXd& theta,
                                       double lambda, int precision_t_z, double ridge) {
  const std::size_t n = data.size();
  if (n == 0) throw ConfigError("cannot evaluate the surrogate on an empty dataset");
  RowMatrixXd grads(static_cast<Eigen::Index>(n), theta.size());
  SurrogateEvaluation out;
  for (std::size_t j = 0; j < n; ++j) {
    const VectorXd x = data.sample(j);
    const double y = data.label(j);
    const VectorXd z = precise_maximizer(model, theta, x, y, lambda, precision_t_z);
    grads.row(static_cast<Eigen::Index>(j)) = grad_theta(model, theta, z, y).transpose();
    out.objective += inner_objective(model, theta, x, y, lambda, z);
  }
  out.objective = out.objective / static_cast<double>(n) + 0.5 * ridge * theta.squaredNorm();
  const VectorXd mean = grads.colwise().sum().transpose() / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.sigma = std::max(out.sigma, (grads.row(static_cast<Eigen::Index>(j)).transpose() - mean).norm());
  }
  out.gradient = mean + ridge * theta;
  return out;
}

double measure_sigma(const Dataset& data, const LossModel& model, const VectorXd& theta, const DROConfig& dro,
                     int precision_t_z) {
  return evaluate_surrogate(data, model, theta, dro.lambda, precision_t_z).sigma;
}

RunTrace run_training(const Dataset& data, const WorkerRoster& roster, const TrainConfig& cfg) {
  cfg.validate();
  roster.validate(data.size(), cfg.screen);
  const Eigen::Index dim = data.dim();
  VectorXd theta = cfg.theta0.size() > 0 ? cfg.theta0 : initial_theta(dim, cfg.seed);
  if (theta.size() != dim) throw StructuralError("theta0 dimension does not match the data");

  const auto honest = roster.honest();
  RunTrace trace;
  trace.theta0 = theta;
  trace.byzantine = roster.byzantine;
  trace.workers = roster.workers;
  trace.screen_count = cfg.screen.screen_count;
  trace.iterations.reserve(static_cast<std::size_t>(cfg.iterations));

  GradientSet<double> grads(roster.workers);
  GradientSet<double> honest_grads;
  honest_grads.reserve(honest.size());

  for (int t = 0; t < cfg.iterations; ++t) {
    DROConfig dro = cfg.dro;
    if (cfg.eps_schedule) {
      dro.t_z = required_iterations(cfg.schedule_constants, dro.lambda, kTransportSmoothness,
                                    cfg.eps_schedule->eps_at(t), cfg.schedule_d_z)
                    .iterations;
    }

    IterationRecord rec;
    rec.t = t;
    rec.t_z = dro.t_z;
    if (cfg.snapshot_every > 0 && t % cfg.snapshot_every == 0) rec.theta = theta;

    double objective_sum = 0.0;
    double inner_error = 0.0;
    std::size_t honest_samples = 0;
    honest_grads.clear();
    for (std::size_t i : honest) {
      VectorXd sum = VectorXd::Zero(dim);
      for (std::size_t j = roster.begin(i); j < roster.end(i); ++j) {
        const VectorXd x = data.sample(j);
        const double y = data.label(j);
        try {
          const auto ascent = inner_maximize(cfg.model, theta, x, y, dro, false);
          sum += grad_theta(cfg.model, theta, ascent.z_final, y);
          objective_sum += inner_objective(cfg.model, theta, x, y, dro.lambda, ascent.z_final);
          if (cfg.diagnostics.enabled) {
            const VectorXd z_star =
                precise_maximizer(cfg.model, theta, x, y, dro.lambda, cfg.diagnostics.precision_t_z);
            inner_error = std::max(inner_error, (ascent.z_final - z_star).norm());
          }
        } catch (const NumericError& e) {
          throw NumericError("iteration " + std::to_string(t) + ", worker " + std::to_string(i) + ", sample " +
                             std::to_string(j) + ": " + e.what());
        }
      }
      grads[i] = sum / static_cast<double>(roster.shard_size) + cfg.ridge * theta;
      honest_samples += roster.shard_size;
      honest_grads.push_back(grads[i]);
    }

    if (!roster.byzantine.empty()) {
      const VectorXd reference = mean_aggregate(honest_grads);
      for (std::size_t i : roster.byzantine) {
        grads[i] = craft(roster.attack, honest_grads, reference, static_cast<std::uint64_t>(t), i);
      }
    }

    rec.worker_grad_norms.reserve(roster.workers);
    for (const auto& g : grads) rec.worker_grad_norms.push_back(g.norm());
    rec.aggregated = norm_screen(grads, cfg.screen);
    rec.aggregated_norm = rec.aggregated.norm();
    rec.objective_estimate =
        objective_sum / static_cast<double>(honest_samples) + 0.5 * cfg.ridge * theta.squaredNorm();

    if (cfg.diagnostics.enabled) {
      const auto eval = evaluate_surrogate(data.slice(0, roster.workers * roster.shard_size), cfg.model, theta,
                                           dro.lambda, cfg.diagnostics.precision_t_z, cfg.ridge);
      IterationDiagnostics diag;
      diag.theta = theta;
      diag.true_gradient = eval.gradient;
      diag.true_objective = eval.objective;
      diag.sigma = eval.sigma;
      diag.inner_error = inner_error;
      rec.diagnostics = std::move(diag);
    }

    theta -= cfg.eta * rec.aggregated;
    if (!theta.allFinite()) throw NumericError("iteration " + std::to_string(t) + ": model became non-finite");
    trace.iterations.push_back(std::move(rec));
  }
  trace.theta_final = theta;
  return trace;
}

std::pair<WorkerRoster, TrainConfig> variant_setup(Algorithm algorithm, const WorkerRoster& roster,
                                                   const TrainConfig& cfg) {
  WorkerRoster r = roster;
  TrainConfig c = cfg;
  const bool plain_mean = algorithm == Algorithm::kDroOnly || algorithm == Algorithm::kErm;
  const bool no_perturbation = algorithm == Algorithm::kNbsOnly || algorithm == Algorithm::kErm;
  if (plain_mean) {
    c.screen.screen_count = 0;
    r.allow_breakpoint = true;
  }
  if (no_perturbation) {
    c.dro.t_z = 0;
    c.eps_schedule.reset();
  }
  return {r, c};
}

RunTrace run_variant(Algorithm algorithm, const Dataset& data, const WorkerRoster& roster, const TrainConfig& cfg) {
  const auto [r, c] = variant_setup(algorithm, roster, cfg);
  return run_training(data, r, c);
}

}  // namespace robustdl
