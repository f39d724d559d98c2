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

// Experiment configuration, environment presets, sweeps and metric records.
// Records are JSON objects, one per line; every record echoes the exact
// configuration of its sweep point so it can be re-run.

#pragma once

#include "robustdl/attacks.hpp"
#include "robustdl/data.hpp"
#include "robustdl/shift_eval.hpp"
#include "robustdl/simulation.hpp"

#include <json.hpp>

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace robustdl {

struct DataSource {
  enum class Kind { kSpambase, kSynthetic };

  Kind kind = Kind::kSpambase;
  std::string path;  // spambase CSV
  SyntheticClassificationSpec synthetic;

  bool operator==(const DataSource&) const = default;
};

struct SweepAxes {
  std::vector<double> budgets;             // shift q
  std::vector<std::size_t> byzantine;      // byzantine worker counts
  std::vector<double> lambdas;
  std::vector<int> t_z;
  std::vector<AttackSpec::Kind> attacks;

  bool empty() const { return budgets.empty() && byzantine.empty() && lambdas.empty() && t_z.empty() && attacks.empty(); }
  bool operator==(const SweepAxes&) const = default;
};

struct ExperimentConfig {
  std::string environment;  // preset label, informational once expanded
  DataSource data;
  double train_fraction = 2.0 / 3.0;
  std::size_t workers = 20;
  bool standardize = true;
  bool append_bias = true;
  std::uint64_t seed = 0;  // split, initialization and attack randomness

  double eta = 1.0;
  int iterations = 300;
  DROConfig dro;
  std::size_t screen_count = 3;
  std::size_t byzantine_count = 0;
  bool allow_breakpoint = false;  // permit byzantine_count > screen_count
  AttackSpec attack;
  ShiftSpec shift;
  std::vector<Algorithm> variants{Algorithm::kAlg2, Algorithm::kDroOnly, Algorithm::kNbsOnly, Algorithm::kErm};
  SweepAxes sweep;

  bool operator==(const ExperimentConfig&) const = default;
};

/// E0: no attack, no shift. E1/E2: aggressive attack on 3 of 20 workers with
/// an L1/L2 shift of 0.3. E3/E4: the same with the intelligent attack.
/// Shared: m = 20, eta = 1, T = 300, lambda = 3, eta_z = 0.05, T_z = 10, b = 3.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

/// A fully expanded configuration for one variant (no sweep axes left).
struct SweepPoint {
  ExperimentConfig config;
  Algorithm variant = Algorithm::kAlg2;
  nlohmann::json coordinates = nlohmann::json::object();  // swept axis values
};

/// Cartesian product of the declared axes (budgets, byzantine, lambdas, t_z,
/// attacks, in that nesting order), times the variant list.
std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg);

struct RunMetrics {
  double clean_misclassification = 0.0;
  double shifted_misclassification = 0.0;
  double clean_loss = 0.0;
  double shifted_loss = 0.0;
  double final_objective_estimate = 0.0;
  double final_aggregated_norm = 0.0;
  double theta_norm = 0.0;
  double mean_t_z = 0.0;
  int iterations = 0;
};

struct MetricRecord {
  SweepPoint point;
  RunMetrics metrics;
};

nlohmann::json record_to_json(const MetricRecord& r);
MetricRecord record_from_json(const nlohmann::json& j);

/// Loads (and caches per config) the train/test split a point trains on.
class DataProvider {
 public:
  const TrainTestSplit& split(const ExperimentConfig& cfg);

 private:
  std::vector<std::pair<std::string, TrainTestSplit>> cache_;
};

/// Trains and evaluates every sweep point. Points that share a training
/// configuration train once; shift budgets within such a group are evaluated
/// in ascending order with warm starts. `sink` receives records in sweep
/// declaration order as they complete.
std::vector<MetricRecord> run_experiment(const ExperimentConfig& cfg, DataProvider& data,
                                         const std::function<void(const MetricRecord&)>& sink = {});

/// Writes one JSON record per line.
void write_record_line(std::ostream& out, const MetricRecord& r);
std::vector<MetricRecord> read_records(std::istream& in);

/// Flat CSV with one row per record.
void write_csv(std::ostream& out, const std::vector<MetricRecord>& records);

/// Markdown table: rows are environments, columns variants; cells are the
/// shifted misclassification rate (clean for unshifted environments).
std::string comparison_table(const std::vector<MetricRecord>& records);

}  // namespace robustdl
