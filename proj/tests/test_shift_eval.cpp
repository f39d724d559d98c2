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

#include "robustdl/shift_eval.hpp"

#include "robustdl/losses.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace robustdl;

namespace {

Dataset random_set(gen::Rng& r, std::size_t n, Eigen::Index d) {
  Dataset ds;
  ds.features.resize(static_cast<Eigen::Index>(n), d);
  ds.labels.resize(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    ds.features.row(static_cast<Eigen::Index>(j)) = r.vector(d).transpose();
    ds.labels[static_cast<Eigen::Index>(j)] = r.coin() ? 1.0 : 0.0;
  }
  return ds;
}

}  // namespace

TEST_CASE("zero budget leaves features unchanged") {
  gen::Rng r(71);
  const auto test = random_set(r, 20, 4);
  ShiftSpec spec;
  spec.budget = 0.0;
  const auto out = perturb_test_set(r.vector(4), test, spec);
  CHECK((out.features - test.features).norm() == 0.0);
}

TEST_CASE("one L2 step moves along the normalized loss gradient") {
  const VectorXd theta = (VectorXd(3) << 1.0, -2.0, 0.5).finished();
  const VectorXd x = (VectorXd(3) << 0.2, 0.1, -0.4).finished();
  const double y = 1.0;
  ShiftSpec spec{ShiftSpec::Norm::kL2, 0.3, 1, 0.3};
  const VectorXd z = perturb_sample(theta, x, y, spec, x);
  const double a = 1.0 / (1.0 + std::exp(-theta.dot(x)));
  const VectorXd g = (a - y) * theta;
  CHECK((z - (x + 0.3 * g / g.norm())).norm() <= 1e-15);
  CHECK((z - x).norm() == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("one L1 step spends the budget on the largest coordinate") {
  const VectorXd theta = (VectorXd(2) << 3.0, -1.0).finished();
  const VectorXd x = VectorXd::Zero(2);
  ShiftSpec spec{ShiftSpec::Norm::kL1, 0.3, 1, 0.3};
  const VectorXd z = perturb_sample(theta, x, 0.0, spec, x);

  // Oracle: the L1 ball's best vertex under the linearized loss.
  const VectorXd g = 0.5 * theta;  // sigmoid(0) - 0
  VectorXd best;
  double best_gain = -1.0;
  for (Eigen::Index k = 0; k < 2; ++k) {
    for (double s : {1.0, -1.0}) {
      VectorXd v = VectorXd::Zero(2);
      v[k] = 0.3 * s;
      if (g.dot(v) > best_gain) {
        best_gain = g.dot(v);
        best = v;
      }
    }
  }
  CHECK((z - best).norm() == 0.0);
  CHECK(z[0] == doctest::Approx(0.3));
  CHECK(z[1] == 0.0);
}

TEST_CASE("steepest ascent directions") {
  const VectorXd g = (VectorXd(3) << 1.0, -4.0, 4.0).finished();
  const VectorXd l1 = steepest_ascent_direction(g, ShiftSpec::Norm::kL1);
  CHECK(l1[1] == -1.0);  // first maximizer wins ties
  CHECK(l1.lpNorm<1>() == 1.0);
  CHECK(steepest_ascent_direction(g, ShiftSpec::Norm::kL2).norm() == doctest::Approx(1.0));
  CHECK(steepest_ascent_direction(VectorXd::Zero(3), ShiftSpec::Norm::kL2).norm() == 0.0);
  CHECK(steepest_ascent_direction(VectorXd::Zero(3), ShiftSpec::Norm::kL1).norm() == 0.0);
}

TEST_CASE("property: projections are feasible and optimal") {
  gen::Rng r(72);
  for (int rep = 0; rep < 500; ++rep) {
    const auto d = static_cast<Eigen::Index>(r.index(1, 20));
    const VectorXd c = r.vector(d);
    const VectorXd z = c + r.vector(d, r.log_uniform(1e-2, 10.0));
    const double q = r.uniform(0.0, 2.0);

    const VectorXd p2 = project_l2_ball(z, c, q);
    CHECK((p2 - c).norm() <= q * (1 + 1e-12));
    if ((z - c).norm() > q) CHECK((p2 - c).norm() == doctest::Approx(q).epsilon(1e-12));

    const VectorXd p1 = project_l1_ball(z, c, q);
    const VectorXd u = z - c, w = p1 - c;
    CHECK(w.lpNorm<1>() <= q * (1 + 1e-12) + 1e-15);
    if (u.lpNorm<1>() > q) {
      CHECK(w.lpNorm<1>() == doctest::Approx(q).epsilon(1e-10));
      // Optimality: kept coordinates shrink by one common threshold, zeroed ones sit below it.
      double tau = -1.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        if (w[k] != 0.0) {
          const double shrink = std::abs(u[k]) - std::abs(w[k]);
          if (tau < 0) tau = shrink;
          CHECK(shrink == doctest::Approx(tau).epsilon(1e-9).scale(1.0));
          CHECK(u[k] * w[k] > 0.0);
        }
      }
      for (Eigen::Index k = 0; k < d; ++k) {
        if (w[k] == 0.0 && tau >= 0) CHECK(std::abs(u[k]) <= tau + 1e-9);
      }
    } else {
      CHECK((p1 - z).norm() == 0.0);
    }
  }
}

TEST_CASE("property: shifted samples stay in the ball and never lower the loss") {
  gen::Rng r(73);
  const auto test = random_set(r, 60, 5);
  const auto model = LossModel::logistic();
  for (auto norm : {ShiftSpec::Norm::kL1, ShiftSpec::Norm::kL2}) {
    const VectorXd theta = r.vector(5);
    ShiftSpec spec{norm, 0.4, 20, 0.0};
    const auto shifted = perturb_test_set(theta, test, spec);
    for (std::size_t j = 0; j < test.size(); ++j) {
      const VectorXd delta = shifted.sample(j) - test.sample(j);
      const double size = norm == ShiftSpec::Norm::kL1 ? delta.lpNorm<1>() : delta.norm();
      CHECK(size <= 0.4 * (1 + 1e-12));
      CHECK(loss_value(model, theta, shifted.sample(j), test.label(j)) >=
            loss_value(model, theta, test.sample(j), test.label(j)));
      CHECK(shifted.label(j) == test.label(j));
    }
  }
}

TEST_CASE("warm-started budget sweep is monotone") {
  gen::Rng r(74);
  const auto test = random_set(r, 80, 6);
  const VectorXd theta = r.vector(6);
  const std::vector<double> budgets{0.0, 0.1, 0.2, 0.3, 0.4};
  for (auto norm : {ShiftSpec::Norm::kL1, ShiftSpec::Norm::kL2}) {
    const auto sets = perturb_budget_sweep(theta, test, ShiftSpec{norm, 0.0, 20, 0.0}, budgets);
    REQUIRE(sets.size() == budgets.size());
    for (std::size_t k = 1; k < sets.size(); ++k) {
      CHECK(average_loss(theta, sets[k]) >= average_loss(theta, sets[k - 1]));
      CHECK(misclassification_rate(theta, sets[k]) >= misclassification_rate(theta, sets[k - 1]) - 1e-12);
    }
  }
  CHECK_THROWS_AS(perturb_budget_sweep(theta, test, ShiftSpec{}, {0.3, 0.1}), ConfigError);
}

TEST_CASE("misclassification") {
  Dataset ds;
  ds.features = (RowMatrixXd(4, 2) << 1, 1, 2, 0.5, -1, -1, -0.5, -2).finished();
  ds.labels = (VectorXd(4) << 1, 1, 0, 0).finished();
  CHECK(misclassification_rate(VectorXd::Zero(2), ds) == 0.5);  // predicts all 1
  CHECK(misclassification_rate(VectorXd::Ones(2), ds) == 0.0);
  CHECK(misclassification_rate(-VectorXd::Ones(2), ds) == 1.0);
  CHECK_THROWS_AS(misclassification_rate(VectorXd::Ones(3), ds), StructuralError);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS((ShiftSpec{ShiftSpec::Norm::kL2, -0.1, 20, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((ShiftSpec{ShiftSpec::Norm::kL2, 0.1, -1, 0.0}.validate()), ConfigError);
  CHECK(ShiftSpec{ShiftSpec::Norm::kL2, 0.4, 20, 0.0}.effective_step() == doctest::Approx(0.05));
  CHECK(shift_norm_from_string(to_string(ShiftSpec::Norm::kL1)) == ShiftSpec::Norm::kL1);
  CHECK_THROWS_AS(shift_norm_from_string("Linf"), ConfigError);
  gen::Rng r(75);
  const auto test = random_set(r, 5, 3);
  CHECK_THROWS_AS(perturb_test_set(VectorXd::Ones(2), test, ShiftSpec{ShiftSpec::Norm::kL2, 0.1, 5, 0.0}),
                  StructuralError);
}
