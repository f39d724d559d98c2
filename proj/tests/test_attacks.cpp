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

#include "robustdl/attacks.hpp"

#include "generators.hpp"

#include <doctest.h>

using namespace robustdl;

TEST_CASE("aggressive attack negates and scales the reference") {
  const VectorXd ref = (VectorXd(2) << 1.0, -2.0).finished();
  const VectorXd out = craft<double>(AttackSpec{}, {ref}, ref);
  CHECK(out[0] == -10.0);
  CHECK(out[1] == 20.0);
}

TEST_CASE("intelligent attack has norm ratio times the reference norm") {
  AttackSpec spec;
  spec.kind = AttackSpec::Kind::kIntelligent;
  const VectorXd ref = (VectorXd(2) << 3.0, 4.0).finished();
  const VectorXd out = craft<double>(spec, {ref}, ref, 7, 2);
  CHECK(out.norm() == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("counterexample attack negates the rank-1 honest gradient") {
  GradientSet<double> honest;
  for (double h : {6.0, 5.0, 4.0, 3.0, 2.0, 1.0}) honest.push_back(VectorXd::Constant(1, h));
  AttackSpec spec;
  spec.kind = AttackSpec::Kind::kCounterexample;
  spec.target_rank = 1;
  CHECK(craft<double>(spec, honest, mean_aggregate(honest))[0] == -2.0);
  spec.target_rank = 6;
  CHECK_THROWS_AS(craft<double>(spec, honest, mean_aggregate(honest)), ConfigError);
}

TEST_CASE("property: intelligent norms and determinism") {
  gen::Rng r(51);
  AttackSpec spec;
  spec.kind = AttackSpec::Kind::kIntelligent;
  for (int rep = 0; rep < 200; ++rep) {
    const auto d = static_cast<Eigen::Index>(r.index(1, 60));
    const VectorXd ref = r.vector(d, r.log_uniform(1e-3, 1e3));
    spec.rng_seed = r.index(0, 1000);
    spec.ratio = r.uniform(0.1, 2.0);
    const auto it = r.index(0, 300), w = r.index(0, 20);
    const VectorXd a = craft<double>(spec, {ref}, ref, it, w);
    const VectorXd b = craft<double>(spec, {ref}, ref, it, w);
    CHECK(a.norm() == doctest::Approx(spec.ratio * ref.norm()).epsilon(1e-12));
    CHECK((a - b).norm() == 0.0);
  }
}

TEST_CASE("intelligent directions differ by worker unless shared") {
  AttackSpec spec;
  spec.kind = AttackSpec::Kind::kIntelligent;
  const VectorXd ref = VectorXd::Ones(8);
  const VectorXd w0 = craft<double>(spec, {ref}, ref, 3, 0);
  const VectorXd w1 = craft<double>(spec, {ref}, ref, 3, 1);
  CHECK((w0 - w1).norm() > 1e-6);
  CHECK((w0 - craft<double>(spec, {ref}, ref, 4, 0)).norm() > 1e-6);
  spec.shared_direction = true;
  CHECK((craft<double>(spec, {ref}, ref, 3, 0) - craft<double>(spec, {ref}, ref, 3, 1)).norm() == 0.0);
}

TEST_CASE("property: aggressive attack norm") {
  gen::Rng r(52);
  for (int rep = 0; rep < 200; ++rep) {
    AttackSpec spec;
    spec.scale = r.uniform(0.5, 50.0);
    const VectorXd ref = r.vector(static_cast<Eigen::Index>(r.index(1, 30)));
    CHECK(craft<double>(spec, {ref}, ref).norm() == doctest::Approx(spec.scale * ref.norm()).epsilon(1e-13));
  }
}

TEST_CASE("zero reference under the intelligent attack sends zero") {
  set_warnings_enabled(false);
  AttackSpec spec;
  spec.kind = AttackSpec::Kind::kIntelligent;
  const VectorXd zero = VectorXd::Zero(3);
  CHECK(craft<double>(spec, {zero}, zero).norm() == 0.0);
  set_warnings_enabled(true);
}

TEST_CASE("spec validation and names") {
  AttackSpec spec;
  spec.scale = 0.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = {};
  spec.kind = AttackSpec::Kind::kIntelligent;
  spec.ratio = -1.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  CHECK_THROWS_AS(craft<double>(AttackSpec{}, {}, VectorXd::Zero(1)), ConfigError);
  for (auto k : {AttackSpec::Kind::kAggressive, AttackSpec::Kind::kIntelligent, AttackSpec::Kind::kCounterexample}) {
    CHECK(attack_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(attack_kind_from_string("sneaky"), ConfigError);
}
