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

#include "robustdl/experiment.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace robustdl {

using nlohmann::json;

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.environment = name;
  c.workers = 20;
  c.eta = 1.0;
  c.iterations = 300;
  c.dro = DROConfig{3.0, 0.05, 10};
  c.screen_count = 3;
  if (name == "E0") return c;

  c.byzantine_count = 3;
  c.shift.budget = 0.3;
  if (name == "E1" || name == "E2") {
    c.attack.kind = AttackSpec::Kind::kAggressive;
  } else if (name == "E3" || name == "E4") {
    c.attack.kind = AttackSpec::Kind::kIntelligent;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected E0..E4)");
  }
  c.shift.norm = (name == "E1" || name == "E3") ? ShiftSpec::Norm::kL1 : ShiftSpec::Norm::kL2;
  return c;
}

std::vector<std::string> preset_names() { return {"E0", "E1", "E2", "E3", "E4"}; }

namespace {

std::string to_string(DataSource::Kind k) { return k == DataSource::Kind::kSpambase ? "spambase" : "synthetic"; }

DataSource::Kind data_kind_from_string(const std::string& s) {
  if (s == "spambase") return DataSource::Kind::kSpambase;
  if (s == "synthetic") return DataSource::Kind::kSynthetic;
  throw ConfigError("unknown data source '" + s + "'");
}

// Reads `key` into `out` when present; absent keys keep their defaults.
template <typename T>
void read(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it != j.end()) it->get_to(out);
}

json data_to_json(const DataSource& d) {
  return {{"kind", to_string(d.kind)},
          {"path", d.path},
          {"synthetic",
           {{"samples", d.synthetic.samples},
            {"features", d.synthetic.features},
            {"positive_ratio", d.synthetic.positive_ratio},
            {"separation", d.synthetic.separation},
            {"seed", d.synthetic.seed}}}};
}

DataSource data_from_json(const json& j) {
  DataSource d;
  if (auto it = j.find("kind"); it != j.end()) d.kind = data_kind_from_string(it->get<std::string>());
  read(j, "path", d.path);
  if (auto it = j.find("synthetic"); it != j.end()) {
    read(*it, "samples", d.synthetic.samples);
    read(*it, "features", d.synthetic.features);
    read(*it, "positive_ratio", d.synthetic.positive_ratio);
    read(*it, "separation", d.synthetic.separation);
    read(*it, "seed", d.synthetic.seed);
  }
  return d;
}

json attack_to_json(const AttackSpec& a) {
  return {{"kind", to_string(a.kind)},       {"scale", a.scale},     {"ratio", a.ratio},
          {"target_rank", a.target_rank},    {"rng_seed", a.rng_seed}, {"shared_direction", a.shared_direction}};
}

AttackSpec attack_from_json(const json& j) {
  AttackSpec a;
  if (auto it = j.find("kind"); it != j.end()) a.kind = attack_kind_from_string(it->get<std::string>());
  read(j, "scale", a.scale);
  read(j, "ratio", a.ratio);
  read(j, "target_rank", a.target_rank);
  read(j, "rng_seed", a.rng_seed);
  read(j, "shared_direction", a.shared_direction);
  return a;
}

json shift_to_json(const ShiftSpec& s) {
  return {{"norm", to_string(s.norm)}, {"budget", s.budget}, {"ascent_steps", s.ascent_steps}, {"step_size", s.step_size}};
}

ShiftSpec shift_from_json(const json& j) {
  ShiftSpec s;
  if (auto it = j.find("norm"); it != j.end()) s.norm = shift_norm_from_string(it->get<std::string>());
  read(j, "budget", s.budget);
  read(j, "ascent_steps", s.ascent_steps);
  read(j, "step_size", s.step_size);
  return s;
}

json sweep_to_json(const SweepAxes& s) {
  json attacks = json::array();
  for (auto k : s.attacks) attacks.push_back(to_string(k));
  return {{"budgets", s.budgets}, {"byzantine", s.byzantine}, {"lambdas", s.lambdas}, {"t_z", s.t_z}, {"attacks", attacks}};
}

SweepAxes sweep_from_json(const json& j) {
  SweepAxes s;
  read(j, "budgets", s.budgets);
  read(j, "byzantine", s.byzantine);
  read(j, "lambdas", s.lambdas);
  read(j, "t_z", s.t_z);
  if (auto it = j.find("attacks"); it != j.end()) {
    for (const auto& a : *it) s.attacks.push_back(attack_kind_from_string(a.get<std::string>()));
  }
  return s;
}

}  // namespace

void to_json(json& j, const ExperimentConfig& c) {
  json variants = json::array();
  for (auto v : c.variants) variants.push_back(to_string(v));
  j = json{{"environment", c.environment},
           {"data", data_to_json(c.data)},
           {"train_fraction", c.train_fraction},
           {"workers", c.workers},
           {"standardize", c.standardize},
           {"append_bias", c.append_bias},
           {"seed", c.seed},
           {"eta", c.eta},
           {"iterations", c.iterations},
           {"dro", {{"lambda", c.dro.lambda}, {"eta_z", c.dro.eta_z}, {"t_z", c.dro.t_z}}},
           {"screen_count", c.screen_count},
           {"byzantine_count", c.byzantine_count},
           {"allow_breakpoint", c.allow_breakpoint},
           {"attack", attack_to_json(c.attack)},
           {"shift", shift_to_json(c.shift)},
           {"variants", variants},
           {"sweep", sweep_to_json(c.sweep)}};
}

void from_json(const json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  // A preset supplies defaults; explicit keys override them.
  if (auto it = j.find("preset"); it != j.end()) c = preset(it->get<std::string>());
  try {
    read(j, "environment", c.environment);
    if (auto it = j.find("data"); it != j.end()) c.data = data_from_json(*it);
    read(j, "train_fraction", c.train_fraction);
    read(j, "workers", c.workers);
    read(j, "standardize", c.standardize);
    read(j, "append_bias", c.append_bias);
    read(j, "seed", c.seed);
    read(j, "eta", c.eta);
    read(j, "iterations", c.iterations);
    if (auto it = j.find("dro"); it != j.end()) {
      read(*it, "lambda", c.dro.lambda);
      read(*it, "eta_z", c.dro.eta_z);
      read(*it, "t_z", c.dro.t_z);
    }
    read(j, "screen_count", c.screen_count);
    read(j, "byzantine_count", c.byzantine_count);
    read(j, "allow_breakpoint", c.allow_breakpoint);
    if (auto it = j.find("attack"); it != j.end()) c.attack = attack_from_json(*it);
    if (auto it = j.find("shift"); it != j.end()) c.shift = shift_from_json(*it);
    if (auto it = j.find("variants"); it != j.end()) {
      c.variants.clear();
      for (const auto& v : *it) c.variants.push_back(algorithm_from_string(v.get<std::string>()));
    }
    if (auto it = j.find("sweep"); it != j.end()) c.sweep = sweep_from_json(*it);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg) {
  if (cfg.variants.empty()) throw ConfigError("no variants selected");
  ExperimentConfig base = cfg;
  base.sweep = {};
  std::vector<std::pair<ExperimentConfig, json>> points{{base, json::object()}};

  // Each axis multiplies the current point list; earlier axes vary slowest.
  const auto expand = [&points](const auto& values, const char* name, auto apply) {
    if (values.empty()) return;
    std::vector<std::pair<ExperimentConfig, json>> next;
    for (const auto& [c, coords] : points) {
      for (const auto& v : values) {
        auto copy = c;
        auto k = coords;
        apply(copy, k[name], v);
        next.emplace_back(std::move(copy), std::move(k));
      }
    }
    points = std::move(next);
  };
  expand(cfg.sweep.budgets, "budget", [](ExperimentConfig& c, json& k, double q) { c.shift.budget = q; k = q; });
  expand(cfg.sweep.byzantine, "byzantine", [](ExperimentConfig& c, json& k, std::size_t n) {
    c.byzantine_count = n;
    k = n;
  });
  expand(cfg.sweep.lambdas, "lambda", [](ExperimentConfig& c, json& k, double l) { c.dro.lambda = l; k = l; });
  expand(cfg.sweep.t_z, "t_z", [](ExperimentConfig& c, json& k, int t) { c.dro.t_z = t; k = t; });
  expand(cfg.sweep.attacks, "attack", [](ExperimentConfig& c, json& k, AttackSpec::Kind a) {
    c.attack.kind = a;
    k = to_string(a);
  });

  std::vector<SweepPoint> out;
  out.reserve(points.size() * cfg.variants.size());
  for (const auto& [c, coords] : points) {
    for (auto v : cfg.variants) {
      SweepPoint p;
      p.config = c;
      p.config.variants = {v};
      p.variant = v;
      p.coordinates = coords;
      out.push_back(std::move(p));
    }
  }
  return out;
}

json record_to_json(const MetricRecord& r) {
  const auto& m = r.metrics;
  return {{"environment", r.point.config.environment},
          {"variant", to_string(r.point.variant)},
          {"coordinates", r.point.coordinates},
          {"config", r.point.config},
          {"metrics",
           {{"clean_misclassification", m.clean_misclassification},
            {"shifted_misclassification", m.shifted_misclassification},
            {"clean_loss", m.clean_loss},
            {"shifted_loss", m.shifted_loss}}},
          {"trace",
           {{"iterations", m.iterations},
            {"final_objective_estimate", m.final_objective_estimate},
            {"final_aggregated_norm", m.final_aggregated_norm},
            {"theta_norm", m.theta_norm},
            {"mean_t_z", m.mean_t_z}}}};
}

MetricRecord record_from_json(const json& j) {
  MetricRecord r;
  try {
    r.point.config = j.at("config").get<ExperimentConfig>();
    r.point.variant = algorithm_from_string(j.at("variant").get<std::string>());
    r.point.coordinates = j.at("coordinates");
    const auto& m = j.at("metrics");
    m.at("clean_misclassification").get_to(r.metrics.clean_misclassification);
    m.at("shifted_misclassification").get_to(r.metrics.shifted_misclassification);
    m.at("clean_loss").get_to(r.metrics.clean_loss);
    m.at("shifted_loss").get_to(r.metrics.shifted_loss);
    const auto& t = j.at("trace");
    t.at("iterations").get_to(r.metrics.iterations);
    t.at("final_objective_estimate").get_to(r.metrics.final_objective_estimate);
    t.at("final_aggregated_norm").get_to(r.metrics.final_aggregated_norm);
    t.at("theta_norm").get_to(r.metrics.theta_norm);
    t.at("mean_t_z").get_to(r.metrics.mean_t_z);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed metric record: ") + e.what());
  }
  return r;
}

const TrainTestSplit& DataProvider::split(const ExperimentConfig& cfg) {
  const std::string key = json{{"data", data_to_json(cfg.data)},
                               {"train_fraction", cfg.train_fraction},
                               {"workers", cfg.workers},
                               {"standardize", cfg.standardize},
                               {"append_bias", cfg.append_bias},
                               {"seed", cfg.seed}}
                              .dump();
  for (const auto& [k, s] : cache_) {
    if (k == key) return s;
  }
  Dataset raw;
  if (cfg.data.kind == DataSource::Kind::kSpambase) {
    if (cfg.data.path.empty()) throw ConfigError("spambase data source needs a path");
    raw = load_spambase(cfg.data.path);
  } else {
    raw = make_synthetic_classification(cfg.data.synthetic);
  }
  SplitOptions opts;
  opts.train_fraction = cfg.train_fraction;
  opts.workers = cfg.workers;
  opts.seed = cfg.seed;
  opts.standardize = cfg.standardize;
  opts.append_bias = cfg.append_bias;
  cache_.emplace_back(key, split_and_shard(raw, opts));
  return cache_.back().second;
}

namespace {

// Everything that influences training, i.e. the config minus the shift.
std::string training_key(const SweepPoint& p) {
  ExperimentConfig c = p.config;
  c.shift = {};
  c.environment.clear();
  return json{{"config", c}, {"variant", to_string(p.variant)}}.dump();
}

struct Trained {
  VectorXd theta;
  RunMetrics partial;  // trace and clean metrics
};

Trained train_point(const SweepPoint& p, const TrainTestSplit& split) {
  const auto& c = p.config;
  auto roster = WorkerRoster::even_split(split.train.size(), c.workers, c.byzantine_count, c.attack);
  roster.allow_breakpoint = c.allow_breakpoint;
  TrainConfig tc;
  tc.model = LossModel::logistic();
  tc.eta = c.eta;
  tc.iterations = c.iterations;
  tc.dro = c.dro;
  tc.screen.screen_count = c.screen_count;
  tc.seed = c.seed;
  const RunTrace trace = run_variant(p.variant, split.train, roster, tc);

  Trained out;
  out.theta = trace.theta_final;
  auto& m = out.partial;
  m.iterations = static_cast<int>(trace.iterations.size());
  if (!trace.iterations.empty()) {
    m.final_objective_estimate = trace.iterations.back().objective_estimate;
    m.final_aggregated_norm = trace.iterations.back().aggregated_norm;
    double tz = 0.0;
    for (const auto& rec : trace.iterations) tz += rec.t_z;
    m.mean_t_z = tz / static_cast<double>(trace.iterations.size());
  }
  m.theta_norm = trace.theta_final.norm();
  m.clean_misclassification = misclassification_rate(trace.theta_final, split.test);
  m.clean_loss = average_loss(trace.theta_final, split.test);
  return out;
}

}  // namespace

std::vector<MetricRecord> run_experiment(const ExperimentConfig& cfg, DataProvider& data,
                                         const std::function<void(const MetricRecord&)>& sink) {
  const auto points = expand_sweep(cfg);
  std::map<std::string, Trained> trained;
  // Last shifted test set per (training key, shift norm and steps), for warm starts.
  std::map<std::string, std::pair<double, Dataset>> warm;

  std::vector<MetricRecord> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    try {
      p.config.shift.validate();
      const auto& split = data.split(p.config);
      const std::string key = training_key(p);
      auto it = trained.find(key);
      if (it == trained.end()) it = trained.emplace(key, train_point(p, split)).first;

      MetricRecord rec;
      rec.point = p;
      rec.metrics = it->second.partial;
      const auto& theta = it->second.theta;
      if (p.config.shift.budget == 0.0) {
        rec.metrics.shifted_misclassification = rec.metrics.clean_misclassification;
        rec.metrics.shifted_loss = rec.metrics.clean_loss;
      } else {
        ShiftSpec s = p.config.shift;
        const std::string wkey = key + json{{"norm", to_string(s.norm)}, {"steps", s.ascent_steps},
                                            {"step", s.step_size}}.dump();
        auto w = warm.find(wkey);
        const bool reuse = w != warm.end() && w->second.first <= s.budget;
        Dataset shifted = perturb_test_set(theta, split.test, s, reuse ? w->second.second : split.test);
        rec.metrics.shifted_misclassification = misclassification_rate(theta, shifted);
        rec.metrics.shifted_loss = average_loss(theta, shifted);
        warm.insert_or_assign(wkey, std::make_pair(s.budget, std::move(shifted)));
      }
      if (sink) sink(rec);
      out.push_back(std::move(rec));
    } catch (const Error& e) {
      json ctx = {{"variant", to_string(p.variant)}, {"coordinates", p.coordinates}, {"config", p.config}};
      throw Error(e.kind(), std::string(e.what()) + "\n  while running " + ctx.dump());
    }
  }
  return out;
}

void write_record_line(std::ostream& out, const MetricRecord& r) {
  out << record_to_json(r).dump() << '\n';
  out.flush();
}

std::vector<MetricRecord> read_records(std::istream& in) {
  std::vector<MetricRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw FormatError("record line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw FormatError("record line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

namespace {

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<MetricRecord>& records) {
  out << "environment,variant,attack,byzantine_count,screen_count,shift_norm,budget,lambda,t_z,seed,"
         "clean_misclassification,shifted_misclassification,clean_loss,shifted_loss,final_objective_estimate,"
         "final_aggregated_norm,theta_norm,iterations\n";
  for (const auto& r : records) {
    const auto& c = r.point.config;
    const auto& m = r.metrics;
    const json row = json::array({c.environment, to_string(r.point.variant), to_string(c.attack.kind),
                                  c.byzantine_count, c.screen_count, to_string(c.shift.norm), c.shift.budget,
                                  c.dro.lambda, c.dro.t_z, c.seed, m.clean_misclassification,
                                  m.shifted_misclassification, m.clean_loss, m.shifted_loss,
                                  m.final_objective_estimate, m.final_aggregated_norm, m.theta_norm, m.iterations});
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

std::string comparison_table(const std::vector<MetricRecord>& records) {
  std::vector<std::string> envs;
  std::vector<Algorithm> variants;
  std::map<std::pair<std::string, Algorithm>, std::vector<double>> cells;
  for (const auto& r : records) {
    const auto& env = r.point.config.environment.empty() ? std::string("-") : r.point.config.environment;
    if (std::find(envs.begin(), envs.end(), env) == envs.end()) envs.push_back(env);
    if (std::find(variants.begin(), variants.end(), r.point.variant) == variants.end()) {
      variants.push_back(r.point.variant);
    }
    cells[{env, r.point.variant}].push_back(r.metrics.shifted_misclassification);
  }
  std::sort(variants.begin(), variants.end());

  std::ostringstream os;
  os << "| environment |";
  for (auto v : variants) os << ' ' << to_string(v) << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < variants.size(); ++i) os << "---|";
  os << '\n';
  os << std::fixed << std::setprecision(4);
  for (const auto& env : envs) {
    os << "| " << env << " |";
    for (auto v : variants) {
      auto it = cells.find({env, v});
      if (it == cells.end()) {
        os << " - |";
        continue;
      }
      // Several records per cell (e.g. seeds) are averaged.
      double sum = 0.0;
      for (double x : it->second) sum += x;
      os << ' ' << sum / static_cast<double>(it->second.size()) << " |";
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace robustdl
