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

// Property and bound suites on synthetic families, as exposed by the
// `verify` subcommand. Each suite returns a pass/fail verdict with a short
// human-readable detail line.

#pragma once

#include "robustdl/bounds.hpp"
#include "robustdl/simulation.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace robustdl {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Random gradient sets with |B| <= b <= m/2; every instance must satisfy the
/// deviation bound of norm screening.
SuiteResult verify_screening_bound(int instances = 10000, std::uint64_t seed = 1);

/// Scalar breakpoint instance plus quadratic-family training at
/// alpha = beta = 0.4 (diverges) and alpha = beta = 0.2 (converges).
SuiteResult verify_breakpoint(std::uint64_t seed = 1);

/// Envelope gradient: closed form on the quadratic family, central
/// differences on the logistic loss.
SuiteResult verify_envelope(int points = 100, std::uint64_t seed = 1);

/// Per-step inner contraction and required_iterations on the quadratic family.
SuiteResult verify_inner_rate();

/// Per-round deviation bound on byzantine quadratic-family runs.
SuiteResult verify_deviation_traces(int seeds = 20);

/// Nonconvex, convex and strongly convex trace bounds at T in {50, 200}.
SuiteResult verify_convergence_bounds();

std::vector<SuiteResult> verify_all();

/// Quadratic-family setup shared by the trace suites.
struct QuadraticRun {
  Dataset data;
  WorkerRoster roster;
  TrainConfig train;
  double l_f = 0.0;  // = lambda_F = c lambda / (lambda - c)
};

QuadraticRun quadratic_run(std::size_t workers, std::size_t byzantine, std::size_t screen, const AttackSpec& attack,
                           int iterations, std::uint64_t seed, double curvature = 1.0, double lambda = 3.0);

}  // namespace robustdl
