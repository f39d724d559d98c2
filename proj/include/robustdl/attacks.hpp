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

// Byzantine gradient generators. Attackers are omniscient: they see every
// honest gradient of the round and the reference ("true global") gradient,
// realized as the mean of the honest gradients.

#pragma once

#include "robustdl/aggregation.hpp"
#include "robustdl/types.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace robustdl {

struct AttackSpec {
  enum class Kind { kAggressive, kIntelligent, kCounterexample };

  Kind kind = Kind::kAggressive;
  double scale = 10.0;          // aggressive: -scale * reference
  double ratio = 0.8;           // intelligent: ratio * ||reference|| * h, ||h|| = 1
  std::size_t target_rank = 1;  // counterexample: 0-based ascending-norm rank among honest gradients
  std::uint64_t rng_seed = 0;
  bool shared_direction = false;  // intelligent: one h per round shared by all byzantine workers

  void validate() const {
    if (kind == Kind::kAggressive && !(scale > 0.0)) throw ConfigError("aggressive scale must be > 0");
    if (kind == Kind::kIntelligent && !(ratio > 0.0)) throw ConfigError("intelligent ratio must be > 0");
  }

  bool operator==(const AttackSpec&) const = default;
};

inline std::string to_string(AttackSpec::Kind k) {
  switch (k) {
    case AttackSpec::Kind::kAggressive: return "aggressive";
    case AttackSpec::Kind::kIntelligent: return "intelligent";
    case AttackSpec::Kind::kCounterexample: return "counterexample";
  }
  return "unknown";
}

inline AttackSpec::Kind attack_kind_from_string(const std::string& s) {
  if (s == "aggressive") return AttackSpec::Kind::kAggressive;
  if (s == "intelligent") return AttackSpec::Kind::kIntelligent;
  if (s == "counterexample") return AttackSpec::Kind::kCounterexample;
  throw ConfigError("unknown attack kind '" + s + "'");
}

/// Unit-norm Gaussian direction determined by (seed, iteration, worker).
template <typename Scalar>
Vector<Scalar> seeded_unit_direction(Eigen::Index dim, std::uint64_t seed, std::uint64_t iteration,
                                     std::uint64_t worker) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(iteration), static_cast<std::uint32_t>(iteration >> 32),
                    static_cast<std::uint32_t>(worker), static_cast<std::uint32_t>(worker >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<Scalar> h(dim);
  do {
    for (Eigen::Index i = 0; i < dim; ++i) h[i] = Scalar(normal(rng));
  } while (h.norm() == Scalar(0));
  return h / h.norm();
}

/// One byzantine gradient for `worker` in round `iteration`.
template <typename Scalar>
Vector<Scalar> craft(const AttackSpec& spec, const GradientSet<Scalar>& honest_grads, const Vector<Scalar>& reference,
                     std::uint64_t iteration = 0, std::uint64_t worker = 0) {
  if (honest_grads.empty()) throw ConfigError("attack requires at least one honest gradient");
  validate_gradient_set(honest_grads);
  spec.validate();
  switch (spec.kind) {
    case AttackSpec::Kind::kAggressive:
      return Scalar(-spec.scale) * reference;
    case AttackSpec::Kind::kIntelligent: {
      const Scalar ref_norm = reference.norm();
      if (ref_norm == Scalar(0)) {
        log_warning("intelligent attack against a zero reference gradient; sending zero");
        return Vector<Scalar>::Zero(reference.size());
      }
      const auto h = seeded_unit_direction<Scalar>(reference.size(), spec.rng_seed, iteration,
                                                   spec.shared_direction ? 0 : worker);
      return (Scalar(spec.ratio) * ref_norm) * h;
    }
    case AttackSpec::Kind::kCounterexample: {
      if (spec.target_rank >= honest_grads.size()) {
        throw ConfigError("counterexample target rank " + std::to_string(spec.target_rank) + " out of range for " +
                          std::to_string(honest_grads.size()) + " honest gradients");
      }
      const auto order = norm_order(honest_grads);
      return -honest_grads[order[spec.target_rank]];
    }
  }
  throw ConfigError("unhandled attack kind");
}

}  // namespace robustdl
