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

// robustdl: run | sweep | verify | report
//
// Configuration is layered: preset (if any), then the --config file, then
// individual flags. Records go to <out>/records.jsonl and <out>/records.csv,
// where <out> is --out, else $ROBUSTDL_OUT_DIR, else ./robustdl_out.

#include "robustdl/experiment.hpp"
#include "robustdl/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using robustdl::ExperimentConfig;

namespace {

struct Overrides {
  std::string config_path;
  std::string preset;
  std::vector<std::string> variants;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string data_path;
  bool synthetic = false;
  std::optional<std::size_t> workers, byzantine, screen;
  bool allow_breakpoint = false;
  std::optional<int> iterations, t_z;
  std::optional<double> eta, lambda, eta_z, budget;
  std::string attack, shift_norm;
  // sweep axes
  std::vector<double> budgets, lambdas;
  std::vector<std::size_t> byzantine_grid;
  std::vector<int> t_z_grid;
  std::vector<std::string> attacks;
};

void add_config_flags(CLI::App* app, Overrides& o, bool sweep) {
  app->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app->add_option("--preset", o.preset, "environment preset E0..E4");
  app->add_option("--variant", o.variants, "alg2, dro_only, nbs_only or erm (repeatable)");
  app->add_option("--seed", o.seed, "split, initialization and attack seed");
  app->add_option("--out", o.out_dir, "output directory");
  app->add_option("--data", o.data_path, "Spambase CSV path");
  app->add_flag("--synthetic", o.synthetic, "use the synthetic Spambase-shaped stand-in");
  app->add_option("--workers", o.workers, "worker count m");
  app->add_option("--byzantine", o.byzantine, "byzantine worker count");
  app->add_option("--screen", o.screen, "screened gradient count b");
  app->add_flag("--allow-breakpoint", o.allow_breakpoint, "permit more byzantine workers than screened gradients");
  app->add_option("--iterations", o.iterations, "training rounds T");
  app->add_option("--eta", o.eta, "learning rate");
  app->add_option("--lambda", o.lambda, "dual variable");
  app->add_option("--eta-z", o.eta_z, "inner ascent step");
  app->add_option("--t-z", o.t_z, "inner ascent iterations");
  app->add_option("--attack", o.attack, "aggressive, intelligent or counterexample");
  app->add_option("--shift-norm", o.shift_norm, "L1 or L2");
  app->add_option("--budget", o.budget, "test shift budget q");
  if (sweep) {
    app->add_option("--budgets", o.budgets, "q grid")->delimiter(',');
    app->add_option("--byzantine-grid", o.byzantine_grid, "byzantine count grid")->delimiter(',');
    app->add_option("--lambdas", o.lambdas, "lambda grid")->delimiter(',');
    app->add_option("--t-z-grid", o.t_z_grid, "T_z grid")->delimiter(',');
    app->add_option("--attacks", o.attacks, "attack kinds")->delimiter(',');
  }
}

ExperimentConfig build_config(const Overrides& o) {
  ExperimentConfig c;
  if (!o.preset.empty()) c = robustdl::preset(o.preset);
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw robustdl::FormatError(o.config_path + ": " + e.what());
    }
    // The file's preset key, if any, would reset earlier layers; honour an
    // explicit --preset by applying it underneath the file instead.
    if (!o.preset.empty() && !j.contains("preset")) j["preset"] = o.preset;
    robustdl::from_json(j, c);
  }
  if (!o.variants.empty()) {
    c.variants.clear();
    for (const auto& v : o.variants) c.variants.push_back(robustdl::algorithm_from_string(v));
  }
  if (o.seed) c.seed = *o.seed;
  if (!o.data_path.empty()) {
    c.data.kind = robustdl::DataSource::Kind::kSpambase;
    c.data.path = o.data_path;
  }
  if (o.synthetic) c.data.kind = robustdl::DataSource::Kind::kSynthetic;
  if (o.workers) c.workers = *o.workers;
  if (o.byzantine) c.byzantine_count = *o.byzantine;
  if (o.screen) c.screen_count = *o.screen;
  if (o.allow_breakpoint) c.allow_breakpoint = true;
  if (o.iterations) c.iterations = *o.iterations;
  if (o.eta) c.eta = *o.eta;
  if (o.lambda) c.dro.lambda = *o.lambda;
  if (o.eta_z) c.dro.eta_z = *o.eta_z;
  if (o.t_z) c.dro.t_z = *o.t_z;
  if (!o.attack.empty()) c.attack.kind = robustdl::attack_kind_from_string(o.attack);
  if (!o.shift_norm.empty()) c.shift.norm = robustdl::shift_norm_from_string(o.shift_norm);
  if (o.budget) c.shift.budget = *o.budget;
  if (!o.budgets.empty()) c.sweep.budgets = o.budgets;
  if (!o.byzantine_grid.empty()) c.sweep.byzantine = o.byzantine_grid;
  if (!o.lambdas.empty()) c.sweep.lambdas = o.lambdas;
  if (!o.t_z_grid.empty()) c.sweep.t_z = o.t_z_grid;
  if (!o.attacks.empty()) {
    c.sweep.attacks.clear();
    for (const auto& a : o.attacks) c.sweep.attacks.push_back(robustdl::attack_kind_from_string(a));
  }
  return c;
}

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ROBUSTDL_OUT_DIR"); env && *env) return env;
  return "robustdl_out";
}

int execute(const ExperimentConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path jsonl = dir / "records.jsonl";
  std::ofstream out(jsonl, std::ios::trunc);
  if (!out) throw robustdl::ConfigError("cannot write " + jsonl.string());
  robustdl::DataProvider data;
  const auto records = robustdl::run_experiment(cfg, data, [&](const robustdl::MetricRecord& r) {
    robustdl::write_record_line(out, r);
    std::cerr << robustdl::to_string(r.point.variant) << ' ' << r.point.coordinates.dump()
              << " shifted_misclassification=" << r.metrics.shifted_misclassification << '\n';
  });
  std::ofstream csv(dir / "records.csv", std::ios::trunc);
  robustdl::write_csv(csv, records);
  std::cout << robustdl::comparison_table(records);
  std::cerr << "wrote " << records.size() << " records to " << jsonl.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally and byzantine-robust distributed training experiments"};
  app.require_subcommand(1);

  Overrides run_o, sweep_o;
  auto* run = app.add_subcommand("run", "run one experiment (sweep axes are ignored)");
  add_config_flags(run, run_o, false);
  auto* sweep = app.add_subcommand("sweep", "run the grid over the declared sweep axes");
  add_config_flags(sweep, sweep_o, true);

  auto* verify = app.add_subcommand("verify", "property and bound suites on synthetic families");

  std::string report_in, report_csv;
  auto* report = app.add_subcommand("report", "aggregate records into a comparison table");
  report->add_option("--in", report_in, "records.jsonl")->required()->check(CLI::ExistingFile);
  report->add_option("--csv", report_csv, "also write a flat CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = build_config(run_o);
      if (!cfg.sweep.empty()) {
        robustdl::log_warning("run ignores sweep axes; use the sweep subcommand");
        cfg.sweep = {};
      }
      return execute(cfg, output_dir(run_o.out_dir));
    }
    if (*sweep) return execute(build_config(sweep_o), output_dir(sweep_o.out_dir));
    if (*verify) {
      bool ok = true;
      for (const auto& r : robustdl::verify_all()) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }
    if (*report) {
      std::ifstream in(report_in);
      const auto records = robustdl::read_records(in);
      std::cout << robustdl::comparison_table(records);
      if (!report_csv.empty()) {
        std::ofstream csv(report_csv, std::ios::trunc);
        robustdl::write_csv(csv, records);
      }
      return 0;
    }
  } catch (const robustdl::Error& e) {
    std::cerr << "robustdl: error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "robustdl: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
