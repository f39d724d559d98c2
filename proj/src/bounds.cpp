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

#include "robustdl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <string_view>

namespace robustdl {

BoundReport make_report(double bound, double measured) {
  BoundReport r;
  r.bound_value = bound;
  r.measured_value = measured;
  r.margin = bound - measured;
  r.satisfied = measured <= bound + kBoundRoundoff * std::max(1.0, std::abs(bound));
  return r;
}

double c_alpha(double alpha, double beta) {
  if (!(beta < 1.0)) throw RegimeError("screened fraction must be < 1");
  return 2.0 * alpha / (1.0 - beta);
}

double delta_term(const TheoryInputs& in) { return in.constants.tz * in.eps + in.sigma; }

double lf_smooth(const SmoothnessConstants& k, double lambda) {
  if (!(lambda > k.zz)) throw RegimeError("lambda must exceed L_zz for the surrogate to be smooth");
  return k.tt + k.tz * k.zt / (lambda - k.zz);
}

double deviation_rhs(const TheoryInputs& in, double grad_norm) {
  return c_alpha(in.alpha, in.beta) * grad_norm + delta_term(in);
}

double r_upper(double alpha, double beta) {
  if (alpha == 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = (1.0 - beta) / (2.0 * alpha);
  return ratio * ratio - 1.0;
}

double default_r(double alpha, double beta) {
  const double upper = r_upper(alpha, beta);
  if (!(upper > 0.0)) throw RegimeError("no admissible r: 2 alpha / (1 - beta) >= 1");
  return std::min(0.5 * upper, 10.0);
}

namespace {

struct RobustTerms {
  double l_f = 0.0;
  double c = 0.0;
  double delta = 0.0;
  double r = 0.0;
  double denom = 1.0;    // 1 - (1 + r) C^2
  double inflate = 0.0;  // 1 + 1/r
};

// Validates r and precomputes the shared factors of the nonconvex and convex
// bounds. Returns nullopt in the clean limit (alpha = 0, Delta = 0, r -> 0)
// where the r-dependent terms vanish.
std::optional<RobustTerms> robust_terms(const TheoryInputs& in) {
  RobustTerms t;
  t.l_f = lf_smooth(in.constants, in.lambda);
  t.c = c_alpha(in.alpha, in.beta);
  t.delta = delta_term(in);
  t.r = in.r ? *in.r : default_r(in.alpha, in.beta);
  if (!(t.r > 0.0)) {
    if (in.alpha == 0.0 && t.delta == 0.0) return std::nullopt;
    throw RegimeError("r must be > 0");
  }
  const double upper = r_upper(in.alpha, in.beta);
  if (!(t.r < upper)) {
    throw RegimeError("r=" + std::to_string(t.r) + " outside (0, " + std::to_string(upper) + ")");
  }
  t.denom = 1.0 - (1.0 + t.r) * t.c * t.c;
  t.inflate = 1.0 + 1.0 / t.r;
  return t;
}

}  // namespace

double nonconvex_bound(const TheoryInputs& in, double f0_minus_fstar, int T) {
  if (T < 1) throw ConfigError("T must be >= 1");
  const auto terms = robust_terms(in);
  if (!terms) return 2.0 * lf_smooth(in.constants, in.lambda) * f0_minus_fstar / T;
  const auto& t = *terms;
  return 2.0 * t.l_f * f0_minus_fstar / (t.denom * T) + t.inflate * t.delta * t.delta / t.denom;
}

double convex_bound(const TheoryInputs& in, double theta0_dist, int T) {
  if (T < 1) throw ConfigError("T must be >= 1");
  const double d = in.k * theta0_dist;
  const auto terms = robust_terms(in);
  if (!terms) return 4.0 * lf_smooth(in.constants, in.lambda) * d * d / T;
  const auto& t = *terms;
  const double transient = 4.0 * t.l_f * d * d / (t.denom * T);
  const double floor = std::sqrt(2.0 * t.inflate / t.denom) * d * t.delta + t.inflate * t.delta * t.delta / (2.0 * t.l_f);
  return std::max(transient, floor);
}

double strongly_convex_contraction(const TheoryInputs& in) {
  const double l_f = lf_smooth(in.constants, in.lambda);
  if (!(in.lambda_f > 0.0)) throw ConfigError("strong convexity modulus must be > 0");
  return (2.0 * l_f * c_alpha(in.alpha, in.beta) + l_f - in.lambda_f) / (l_f + in.lambda_f);
}

double strongly_convex_bound(const TheoryInputs& in, double theta0_dist, int T) {
  if (T < 0) throw ConfigError("T must be >= 0");
  const double l_f = lf_smooth(in.constants, in.lambda);
  const double lf_ = in.lambda_f;
  if (!(lf_ > 0.0)) throw ConfigError("strong convexity modulus must be > 0");
  if (lf_ > l_f * (1.0 + 1e-12)) throw ConfigError("strong convexity modulus exceeds the smoothness constant");
  // C_a < lambda_F / L_F, multiplied out so the threshold case is exact.
  if (2.0 * in.alpha * l_f + in.beta * lf_ >= lf_) {
    throw RegimeError("contraction factor >= 1: alpha must be < 1/(1 + 2 L_F/lambda_F) when beta = alpha");
  }
  const double c = c_alpha(in.alpha, in.beta);
  const double q = std::max(0.0, (2.0 * l_f * c + l_f - lf_) / (l_f + lf_));
  return std::pow(q, T) * theta0_dist + delta_term(in) / (lf_ - l_f * c);
}

double strongly_convex_alpha_threshold(double l_f, double lambda_f) { return 1.0 / (1.0 + 2.0 * l_f / lambda_f); }

ReferenceOptimum reference_optimum(const Dataset& data, const LossModel& model, double lambda, double l_f,
                                   const ReferenceOptions& opts) {
  if (!(l_f > 0.0)) throw ConfigError("L_F must be > 0");
  ReferenceOptimum out;
  out.theta = VectorXd::Zero(data.dim());
  for (out.iterations = 0; out.iterations < opts.max_iterations; ++out.iterations) {
    const auto eval = evaluate_surrogate(data, model, out.theta, lambda, opts.precision_t_z, opts.ridge);
    out.objective = eval.objective;
    if (eval.gradient.norm() < opts.gradient_tolerance) break;
    out.theta -= eval.gradient / l_f;
  }
  out.objective = evaluate_surrogate(data, model, out.theta, lambda, opts.precision_t_z, opts.ridge).objective;
  return out;
}

const ReferenceOptimum& cached_reference_optimum(const Dataset& data, const LossModel& model, double lambda,
                                                 double l_f, const ReferenceOptions& opts) {
  static std::mutex mu;
  static std::map<std::size_t, ReferenceOptimum> cache;

  const auto bytes = [](const auto* p, std::size_t n) {
    return std::string_view(reinterpret_cast<const char*>(p), n * sizeof(*p));
  };
  std::string key;
  key += bytes(data.features.data(), static_cast<std::size_t>(data.features.size()));
  key += bytes(data.labels.data(), static_cast<std::size_t>(data.labels.size()));
  const double params[] = {static_cast<double>(model.kind), model.curvature, lambda, l_f,
                           static_cast<double>(opts.max_iterations), opts.gradient_tolerance,
                           static_cast<double>(opts.precision_t_z), opts.ridge, static_cast<double>(data.dim())};
  key += bytes(params, std::size(params));
  const std::size_t h = std::hash<std::string>{}(key);

  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(h);
  if (it == cache.end()) it = cache.emplace(h, reference_optimum(data, model, lambda, l_f, opts)).first;
  return it->second;
}

TheoryInputs theory_from_trace(const RunTrace& trace, const SmoothnessConstants& k, double lambda, double lambda_f) {
  TheoryInputs in;
  in.constants = k;
  in.lambda = lambda;
  in.lambda_f = lambda_f;
  in.alpha = static_cast<double>(trace.byzantine.size()) / static_cast<double>(trace.workers);
  in.beta = static_cast<double>(trace.screen_count) / static_cast<double>(trace.workers);
  for (const auto& rec : trace.iterations) {
    if (!rec.diagnostics) throw ConfigError("trace was recorded without diagnostics");
    in.eps = std::max(in.eps, rec.diagnostics->inner_error);
    in.sigma = std::max(in.sigma, rec.diagnostics->sigma);
  }
  return in;
}

std::vector<BoundReport> check_deviation(const RunTrace& trace, const SmoothnessConstants& k, double lambda) {
  if (trace.byzantine.size() > trace.screen_count) {
    throw BoundInapplicableError("byzantine count exceeds screen count");
  }
  if (2 * trace.byzantine.size() > trace.workers) throw BoundInapplicableError("byzantine fraction exceeds 1/2");
  TheoryInputs in;
  in.constants = k;
  in.lambda = lambda;
  in.alpha = static_cast<double>(trace.byzantine.size()) / static_cast<double>(trace.workers);
  in.beta = static_cast<double>(trace.screen_count) / static_cast<double>(trace.workers);
  std::vector<BoundReport> out;
  out.reserve(trace.iterations.size());
  for (const auto& rec : trace.iterations) {
    if (!rec.diagnostics) throw ConfigError("trace was recorded without diagnostics");
    const auto& d = *rec.diagnostics;
    in.eps = d.inner_error;
    in.sigma = d.sigma;
    out.push_back(make_report(deviation_rhs(in, d.true_gradient.norm()), (rec.aggregated - d.true_gradient).norm()));
  }
  return out;
}

BoundReport check_nonconvex(const RunTrace& trace, const TheoryInputs& in, double f_star) {
  if (trace.iterations.empty()) throw ConfigError("empty trace");
  double sum = 0.0;
  for (const auto& rec : trace.iterations) {
    if (!rec.diagnostics) throw ConfigError("trace was recorded without diagnostics");
    sum += rec.diagnostics->true_gradient.squaredNorm();
  }
  const int T = static_cast<int>(trace.iterations.size());
  const double f0 = trace.iterations.front().diagnostics->true_objective;
  return make_report(nonconvex_bound(in, f0 - f_star, T), sum / T);
}

ConvexReport check_convex(const RunTrace& trace, TheoryInputs in, const ReferenceOptimum& opt,
                              double final_objective) {
  if (trace.iterations.empty()) throw ConfigError("empty trace");
  const double d0 = (trace.theta0 - opt.theta).norm();
  ConvexReport out;
  out.measured_k = 1.0;
  if (d0 > 0.0) {
    for (const auto& rec : trace.iterations) {
      if (!rec.diagnostics) throw ConfigError("trace was recorded without diagnostics");
      out.measured_k = std::max(out.measured_k, (rec.diagnostics->theta - opt.theta).norm() / d0);
    }
  }
  in.k = out.measured_k;
  const int T = static_cast<int>(trace.iterations.size());
  const double bound = convex_bound(in, d0, T);
  out.report = make_report(bound, final_objective - opt.objective);
  const double f0 = trace.iterations.front().diagnostics->true_objective;
  out.vacuous = bound >= f0 - opt.objective;
  return out;
}

BoundReport check_strongly_convex(const RunTrace& trace, const TheoryInputs& in, const VectorXd& theta_star) {
  const int T = static_cast<int>(trace.iterations.size());
  return make_report(strongly_convex_bound(in, (trace.theta0 - theta_star).norm(), T),
                     (trace.theta_final - theta_star).norm());
}

}  // namespace robustdl
