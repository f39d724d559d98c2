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

#include "robustdl/aggregation.hpp"

#include "generators.hpp"

#include <doctest.h>

using namespace robustdl;

namespace {

GradientSet<double> scalars(std::initializer_list<double> v) {
  GradientSet<double> g;
  for (double x : v) g.push_back(VectorXd::Constant(1, x));
  return g;
}

// Breakpoint instance: byzantine -2 at indices 0..3, honest 6..1 at 4..9.
GradientSet<double> breakpoint_instance() { return scalars({-2, -2, -2, -2, 6, 5, 4, 3, 2, 1}); }

}  // namespace

TEST_CASE("identical inputs screen to themselves") {
  const VectorXd v = (VectorXd(3) << 1.5, -2.0, 0.25).finished();
  const GradientSet<double> g(10, v);
  CHECK((norm_screen(g, ScreenConfig{3}) - v).norm() == 0.0);
}

TEST_CASE("breakpoint instance keeps four byzantine copies") {
  const auto g = breakpoint_instance();
  const auto kept = screened_indices(g, ScreenConfig{4});
  // Norm 1 first, then the four byzantine -2 (lower indices win the tie), then the honest 2.
  CHECK(kept == std::vector<std::size_t>{9, 0, 1, 2, 3, 8});
  CHECK(norm_screen(g, ScreenConfig{4})[0] == doctest::Approx(-5.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("toy instance screens the largest norm") {
  const auto g = scalars({4, 6, -5.9});
  CHECK(screened_indices(g, ScreenConfig{1}) == std::vector<std::size_t>{0, 2});
  CHECK(norm_screen(g, ScreenConfig{1})[0] == doctest::Approx(-0.95).epsilon(1e-15));
}

TEST_CASE("toy instance deviation bound") {
  const auto g = scalars({4, 6, -5.9});
  const VectorXd S = VectorXd::Constant(1, 5.0);
  const auto bound = screening_rhs(g, {0, 1}, ScreenConfig{1}, S);
  CHECK(bound.c_alpha == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bound.delta == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bound.rhs == doctest::Approx(6.0).epsilon(1e-15));

  const auto check = check_screening_bound(g, {0, 1}, ScreenConfig{1}, S);
  CHECK(check.holds);
  CHECK(check.lhs == doctest::Approx(5.95).epsilon(1e-14));
  CHECK(check.slack == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("all honest: rhs is the honest spread") {
  gen::Rng r(11);
  const auto g = gen::gradient_set(r, 7, 4);
  const VectorXd S = r.vector(4);
  double delta = 0.0;
  for (const auto& v : g) delta = std::max(delta, (v - S).norm());
  const auto bound = screening_rhs(g, {0, 1, 2, 3, 4, 5, 6}, ScreenConfig{2}, S);
  CHECK(bound.c_alpha == 0.0);
  CHECK(bound.rhs == delta);
}

TEST_CASE("identical inputs: slack equals C_alpha ||S||") {
  const VectorXd v = (VectorXd(2) << 3.0, 4.0).finished();
  const GradientSet<double> g(8, v);
  const auto check = check_screening_bound(g, {2, 3, 4, 5, 6, 7}, ScreenConfig{3}, v);
  const double c = 2.0 * (2.0 / 8.0) / (1.0 - 3.0 / 8.0);
  CHECK(check.holds);
  CHECK(check.slack == doctest::Approx(c * 5.0).epsilon(1e-14));
}

TEST_CASE("fixed fuzz shape: d=8, m=12, three byzantine, b=4") {
  gen::Rng r(5);
  for (int rep = 0; rep < 200; ++rep) {
    const VectorXd S = r.vector(8);
    GradientSet<double> g;
    std::set<std::size_t> honest;
    for (std::size_t i = 0; i < 12; ++i) {
      if (i < 3) {
        g.push_back(r.coin() ? VectorXd(-4.0 * S) : r.vector_with_norm(8, S.norm()));
      } else {
        g.push_back(S + 0.3 * r.vector(8));
        honest.insert(i);
      }
    }
    CHECK(check_screening_bound(g, honest, ScreenConfig{4}, S).holds);
  }
}

TEST_CASE("errors") {
  const auto g = scalars({1, 2, 3});
  CHECK_THROWS_AS(norm_screen(GradientSet<double>{}, ScreenConfig{0}), StructuralError);
  CHECK_THROWS_AS(norm_screen(g, ScreenConfig{3}), ConfigError);
  GradientSet<double> ragged = g;
  ragged.push_back(VectorXd::Zero(2));
  CHECK_THROWS_AS(norm_screen(ragged, ScreenConfig{1}), StructuralError);

  const VectorXd S = VectorXd::Constant(1, 1.0);
  // Two byzantine with b = 1.
  CHECK_THROWS_AS(screening_rhs(g, {0}, ScreenConfig{1}, S), BoundInapplicableError);
  // More than half byzantine even though b covers them.
  const auto five = scalars({1, 2, 3, 4, 5});
  CHECK_THROWS_AS(screening_rhs(five, {0, 1}, ScreenConfig{4}, S), BoundInapplicableError);
  CHECK_THROWS_AS(screening_rhs(g, {0, 1}, ScreenConfig{1}, VectorXd(VectorXd::Zero(2))), StructuralError);
  CHECK_THROWS_AS(screening_rhs(g, {}, ScreenConfig{1}, S), ConfigError);
}

TEST_CASE("property: permutation invariance") {
  gen::Rng r(21);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t m = r.index(2, 30);
    const auto g = gen::gradient_set(r, m, static_cast<Eigen::Index>(r.index(1, 16)));
    const ScreenConfig cfg{r.index(0, m - 1)};
    auto shuffled = g;
    r.shuffle(shuffled);
    // Summation order follows the norm order, so the results agree bitwise.
    CHECK((norm_screen(g, cfg) - norm_screen(shuffled, cfg)).norm() == 0.0);
  }
}

TEST_CASE("property: positive scaling equivariance") {
  gen::Rng r(22);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t m = r.index(2, 30);
    const auto g = gen::gradient_set(r, m, static_cast<Eigen::Index>(r.index(1, 16)));
    const ScreenConfig cfg{r.index(0, m - 1)};
    const double c = r.log_uniform(1e-3, 1e3);
    GradientSet<double> scaled;
    for (const auto& v : g) scaled.push_back(c * v);
    const VectorXd a = norm_screen(scaled, cfg);
    const VectorXd b = c * norm_screen(g, cfg);
    CHECK((a - b).norm() <= 1e-12 * std::max(1.0, b.norm()));
  }
}

TEST_CASE("property: b = 0 is the plain mean") {
  gen::Rng r(23);
  for (int rep = 0; rep < 300; ++rep) {
    const auto g = gen::gradient_set(r, r.index(1, 40), static_cast<Eigen::Index>(r.index(1, 16)));
    VectorXd oracle = VectorXd::Zero(g.front().size());
    for (const auto& v : g) oracle += v;
    oracle /= static_cast<double>(g.size());
    CHECK((norm_screen(g, ScreenConfig{0}) - oracle).norm() <= 1e-12 * std::max(1.0, oracle.norm()));
    CHECK((mean_aggregate(g) - oracle).norm() <= 1e-12 * std::max(1.0, oracle.norm()));
  }
}

TEST_CASE("property: kept inputs never outnorm a screened one") {
  gen::Rng r(24);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t m = r.index(2, 30);
    const auto g = gen::gradient_set(r, m, 3);
    const ScreenConfig cfg{r.index(0, m - 1)};
    const auto kept = screened_indices(g, cfg);
    REQUIRE(kept.size() == m - cfg.screen_count);
    std::set<std::size_t> kept_set(kept.begin(), kept.end());
    double max_kept = 0.0, min_dropped = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (kept_set.count(i)) max_kept = std::max(max_kept, g[i].norm());
      else min_dropped = std::min(min_dropped, g[i].norm());
    }
    CHECK(max_kept <= min_dropped);
  }
}

TEST_CASE("float scalar instantiation") {
  GradientSet<float> g{Vector<float>::Constant(2, 1.0f), Vector<float>::Constant(2, 3.0f),
                       Vector<float>::Constant(2, -100.0f)};
  const Vector<float> out = norm_screen(g, ScreenConfig{1});
  CHECK(out[0] == doctest::Approx(2.0f));
}
