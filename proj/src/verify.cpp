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

#include "robustdl/verify.hpp"

#include "robustdl/aggregation.hpp"
#include "robustdl/dro.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace robustdl {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

VectorXd gaussian(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> n(0.0, 1.0);
  VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

}  // namespace

SuiteResult verify_screening_bound(int instances, std::uint64_t seed) {
  SuiteResult out{"screening deviation bound", true, ""};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double min_slack = std::numeric_limits<double>::infinity();
  for (int n = 0; n < instances; ++n) {
    const auto d = static_cast<Eigen::Index>(1 + rng() % 64);
    const std::size_t m = 3 + rng() % 48;
    const std::size_t b = rng() % (m / 2 + 1);
    const std::size_t nb = b == 0 ? 0 : rng() % (b + 1);
    const double s_scale = unit(rng) < 0.1 ? 0.0 : std::pow(10.0, 2.0 * unit(rng) - 1.0);
    const double spread = std::pow(10.0, 4.0 * unit(rng) - 3.0);
    const VectorXd S = s_scale * gaussian(rng, d);

    GradientSet<double> g(m);
    std::set<std::size_t> honest;
    // Byzantine workers sit at random positions.
    std::vector<std::size_t> slots(m);
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    std::shuffle(slots.begin(), slots.end(), rng);
    double honest_max_norm = 0.0;
    for (std::size_t k = nb; k < m; ++k) {
      g[slots[k]] = S + spread * gaussian(rng, d);
      honest.insert(slots[k]);
      honest_max_norm = std::max(honest_max_norm, g[slots[k]].norm());
    }
    for (std::size_t k = 0; k < nb; ++k) {
      VectorXd v;
      switch (rng() % 4) {
        case 0: v = 1e3 * gaussian(rng, d); break;
        case 1: v = -g[*honest.begin()]; break;
        case 2: v = 1e-6 * gaussian(rng, d); break;
        default: {
          VectorXd h = gaussian(rng, d);
          v = honest_max_norm * h / h.norm();
        }
      }
      g[slots[k]] = v;
    }
    const auto check = check_screening_bound(g, honest, ScreenConfig{b}, S);
    min_slack = std::min(min_slack, check.slack);
    if (!check.holds) {
      out.passed = false;
      out.detail = "instance " + std::to_string(n) + " violates the bound: lhs " + fmt(check.lhs) + " rhs " +
                   fmt(check.rhs);
      return out;
    }
  }
  out.detail = std::to_string(instances) + " instances, min slack " + fmt(min_slack);
  return out;
}

QuadraticRun quadratic_run(std::size_t workers, std::size_t byzantine, std::size_t screen, const AttackSpec& attack,
                           int iterations, std::uint64_t seed, double curvature, double lambda) {
  QuadraticRun run;
  SyntheticQuadraticSpec spec;
  spec.workers = workers;
  spec.seed = seed;
  run.data = make_quadratic_family_data(spec);
  run.roster = WorkerRoster::even_split(run.data.size(), workers, byzantine, attack);
  run.train.model = LossModel::quadratic(curvature);
  run.l_f = lf_smooth(constants(run.train.model, 0.0), lambda);
  run.train.eta = 1.0 / run.l_f;
  run.train.iterations = iterations;
  run.train.dro = DROConfig{lambda, 0.05, 10};
  run.train.screen.screen_count = screen;
  run.train.seed = seed;
  run.train.diagnostics.enabled = true;
  return run;
}

SuiteResult verify_breakpoint(std::uint64_t seed) {
  SuiteResult out{"breakpoint", true, ""};
  GradientSet<double> g;
  for (int i = 0; i < 4; ++i) g.push_back(VectorXd::Constant(1, -2.0));
  for (double h : {6.0, 5.0, 4.0, 3.0, 2.0, 1.0}) g.push_back(VectorXd::Constant(1, h));
  const double screened = norm_screen(g, ScreenConfig{4})[0];
  const bool scalar_ok = std::abs(screened - (-5.0 / 6.0)) <= 1e-15;

  AttackSpec attack;
  attack.kind = AttackSpec::Kind::kCounterexample;
  attack.target_rank = 1;
  const auto dist = [](const QuadraticRun& r, const RunTrace& t) {
    const VectorXd theta_star = r.data.features.colwise().mean().transpose();
    return std::make_pair((t.theta0 - theta_star).norm(), (t.theta_final - theta_star).norm());
  };
  auto bad = quadratic_run(10, 4, 4, attack, 50, seed);
  bad.train.diagnostics.enabled = false;
  const auto [d0_bad, dT_bad] = dist(bad, run_training(bad.data, bad.roster, bad.train));
  auto good = quadratic_run(10, 2, 2, attack, 50, seed);
  good.train.diagnostics.enabled = false;
  const auto [d0_good, dT_good] = dist(good, run_training(good.data, good.roster, good.train));

  const bool diverged = dT_bad > 1e3 * d0_bad;
  const bool converged = dT_good < 0.1 * d0_good;
  out.passed = scalar_ok && diverged && converged;
  out.detail = "scalar " + fmt(screened) + "; alpha=0.4 distance " + fmt(d0_bad) + " -> " + fmt(dT_bad) +
               "; alpha=0.2 distance " + fmt(d0_good) + " -> " + fmt(dT_good);
  return out;
}

SuiteResult verify_envelope(int points, std::uint64_t seed) {
  SuiteResult out{"envelope gradient", true, ""};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_closed = 0.0;
  double worst_fd = 0.0;
  const double lambda = 3.0;
  for (int n = 0; n < points; ++n) {
    const auto d = static_cast<Eigen::Index>(2 + rng() % 9);
    const VectorXd x = gaussian(rng, d);

    const auto quad = LossModel::quadratic(1.0);
    const VectorXd tq = gaussian(rng, d);
    const VectorXd zs = exact_maximizer(quad, tq, x, lambda);
    const VectorXd g_env = grad_theta(quad, tq, zs, 0.0);
    const VectorXd g_closed = lambda * (tq - x) / (lambda - 1.0);
    worst_closed = std::max(worst_closed, (g_env - g_closed).norm() / std::max(1.0, g_closed.norm()));

    const auto logit = LossModel::logistic();
    VectorXd theta = gaussian(rng, d);
    theta *= (0.2 + 1.8 * unit(rng)) / theta.norm();
    const double y = static_cast<double>(rng() % 2);
    const DROConfig precise{lambda, theoretical_ascent_step(lambda), 200};
    const VectorXd g = surrogate_gradient(logit, theta, x, y, precise);
    VectorXd fd(d);
    const double h = 1e-6;
    for (Eigen::Index k = 0; k < d; ++k) {
      VectorXd tp = theta, tm = theta;
      tp[k] += h;
      tm[k] -= h;
      fd[k] = (surrogate_value(logit, tp, x, y, precise) - surrogate_value(logit, tm, x, y, precise)) / (2.0 * h);
    }
    worst_fd = std::max(worst_fd, (fd - g).norm() / std::max(g.norm(), 1e-6));
  }
  out.passed = worst_closed <= 1e-10 && worst_fd <= 1e-4;
  out.detail = "closed-form rel err " + fmt(worst_closed) + ", finite-difference rel err " + fmt(worst_fd);
  return out;
}

SuiteResult verify_inner_rate() {
  SuiteResult out{"inner ascent rate", true, ""};
  const auto quad = LossModel::quadratic(1.0);
  const auto k = constants(quad, 0.0);
  std::mt19937_64 rng(3);
  const VectorXd theta = gaussian(rng, 4);
  const VectorXd x = gaussian(rng, 4);
  double worst_rate = 0.0;
  std::ostringstream detail;
  const std::pair<double, double> settings[] = {{2.0, 1e-3}, {3.0, 1e-6}, {5.0, 1e-8}};
  for (const auto& [lambda, rel_eps] : settings) {
    const VectorXd zs = exact_maximizer(quad, theta, x, lambda);
    const double d0 = (x - zs).norm();
    const auto req = required_iterations(k, lambda, kTransportSmoothness, rel_eps * d0, d0);
    DROConfig cfg{lambda, theoretical_ascent_step(lambda), 0};
    double prev = d0;
    int reached = -1;
    for (int t = 1; t <= 60; ++t) {
      cfg.t_z = t;
      const double err = (inner_maximize(quad, theta, x, 0.0, cfg, false).z_final - zs).norm();
      if (prev > 1e-9 * d0) worst_rate = std::max(worst_rate, std::abs(err / prev - req.p));
      if (reached < 0 && err <= rel_eps * d0) reached = t;
      prev = err;
    }
    if (reached != req.iterations) out.passed = false;
    detail << "lambda " << lambda << ": required " << req.iterations << " measured " << reached << "; ";
  }
  if (worst_rate > 1e-6) out.passed = false;
  detail << "max per-step rate deviation " << fmt(worst_rate);
  out.detail = detail.str();
  return out;
}

SuiteResult verify_deviation_traces(int seeds) {
  SuiteResult out{"per-round deviation bound", true, ""};
  const AttackSpec::Kind kinds[] = {AttackSpec::Kind::kAggressive, AttackSpec::Kind::kIntelligent,
                                    AttackSpec::Kind::kCounterexample};
  double min_margin = std::numeric_limits<double>::infinity();
  std::size_t rounds = 0;
  for (int s = 0; s < seeds; ++s) {
    AttackSpec attack;
    attack.kind = kinds[s % 3];
    attack.rng_seed = static_cast<std::uint64_t>(s);
    const std::size_t screen = 1 + static_cast<std::size_t>(s) % 4;
    const std::size_t byz = static_cast<std::size_t>(s) % (screen + 1);
    const auto run = quadratic_run(10, byz, screen, attack, 40, static_cast<std::uint64_t>(100 + s));
    const auto trace = run_training(run.data, run.roster, run.train);
    for (const auto& r : check_deviation(trace, constants(run.train.model, 0.0), run.train.dro.lambda)) {
      ++rounds;
      min_margin = std::min(min_margin, r.margin);
      if (!r.satisfied) out.passed = false;
    }
  }
  out.detail = std::to_string(rounds) + " rounds over " + std::to_string(seeds) + " seeds, min margin " +
               fmt(min_margin);
  return out;
}

SuiteResult verify_convergence_bounds() {
  SuiteResult out{"convergence bounds", true, ""};
  std::ostringstream detail;
  AttackSpec attack;
  attack.kind = AttackSpec::Kind::kIntelligent;
  for (int T : {50, 200}) {
    auto run = quadratic_run(10, 1, 2, attack, T, 7);
    const auto trace = run_training(run.data, run.roster, run.train);
    const auto k = constants(run.train.model, 0.0);
    const double lambda = run.train.dro.lambda;
    const auto& opt = cached_reference_optimum(run.data, run.train.model, lambda, run.l_f);
    const auto in = theory_from_trace(trace, k, lambda, run.l_f);
    const auto t2 = check_nonconvex(trace, in, opt.objective);
    const double f_final = evaluate_surrogate(run.data, run.train.model, trace.theta_final, lambda, 200).objective;
    const auto t3 = check_convex(trace, in, opt, f_final);
    const auto t4 = check_strongly_convex(trace, in, opt.theta);
    out.passed = out.passed && t2.satisfied && t3.report.satisfied && t4.satisfied;
    detail << "T=" << T << ": nonconvex " << fmt(t2.measured_value) << "<=" << fmt(t2.bound_value) << ", convex "
           << fmt(t3.report.measured_value) << "<=" << fmt(t3.report.bound_value) << ", strongly convex "
           << fmt(t4.measured_value) << "<=" << fmt(t4.bound_value) << "; ";
  }

  // Regime edge: L_F = 1.5, lambda_F = 1 puts the threshold at alpha = 1/4.
  TheoryInputs edge;
  edge.constants = {1.0, 1.0, 1.0, 1.0, false};
  edge.lambda = 3.0;
  edge.lambda_f = 1.0;
  const auto fires = [&](double alpha) {
    edge.alpha = edge.beta = alpha;
    try {
      strongly_convex_bound(edge, 1.0, 10);
      return false;
    } catch (const RegimeError&) {
      return true;
    }
  };
  const bool edge_ok = fires(0.25) && !fires(std::nextafter(0.25, 0.0)) && fires(0.3);
  out.passed = out.passed && edge_ok;
  detail << "threshold " << fmt(strongly_convex_alpha_threshold(1.5, 1.0)) << (edge_ok ? " exact" : " MISMATCH");
  out.detail = detail.str();
  return out;
}

std::vector<SuiteResult> verify_all() {
  return {verify_screening_bound(), verify_breakpoint(),       verify_envelope(),
          verify_inner_rate(),      verify_deviation_traces(), verify_convergence_bounds()};
}

}  // namespace robustdl
