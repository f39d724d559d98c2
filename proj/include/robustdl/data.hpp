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

#pragma once

#include "robustdl/types.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace robustdl {

/// Per-feature standardization fitted on the training split.
struct Normalization {
  bool applied = false;
  VectorXd mean;
  VectorXd stddev;  // zero-variance features are recorded as 0 and mapped to 0
  bool bias_appended = false;
};

/// Samples as rows of `features`; labels in {0, 1}.
struct Dataset {
  RowMatrixXd features;
  VectorXd labels;
  std::string source;
  Normalization normalization;

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
  Eigen::Index dim() const { return features.cols(); }
  VectorXd sample(std::size_t j) const { return features.row(static_cast<Eigen::Index>(j)).transpose(); }
  double label(std::size_t j) const { return labels[static_cast<Eigen::Index>(j)]; }

  /// Rows [begin, end) as a new dataset.
  Dataset slice(std::size_t begin, std::size_t end) const;
  /// Rows in the given order.
  Dataset select(const std::vector<std::size_t>& rows) const;
  /// Fraction of samples labelled 1.
  double positive_ratio() const;

  void validate() const;
};

inline constexpr int kSpambaseFeatures = 57;

/// Parses comma-separated rows of `expected_features` numeric columns plus a
/// final 0/1 label, no header. No normalization is applied here; statistics
/// must come from the training split (see split_and_shard).
Dataset parse_labelled_csv(std::istream& in, const std::string& source, int expected_features = kSpambaseFeatures);
Dataset load_spambase(const std::string& path);

struct SplitOptions {
  double train_fraction = 2.0 / 3.0;
  std::size_t workers = 20;
  std::uint64_t seed = 0;
  bool standardize = true;
  bool append_bias = true;
};

/// Training rows are already shuffled and truncated to workers * shard_size;
/// worker i owns rows [i * shard_size, (i + 1) * shard_size).
struct TrainTestSplit {
  Dataset train;
  Dataset test;
  std::size_t workers = 0;
  std::size_t shard_size = 0;
  std::size_t dropped = 0;  // training rows dropped for divisibility
};

/// Stratified split (per-class counts rounded to nearest), optional
/// standardization fitted on the training rows, then a seeded shuffle of the
/// training rows dealt into equal contiguous shards.
TrainTestSplit split_and_shard(const Dataset& ds, const SplitOptions& opts);

/// Applies `norm` (and the bias column if recorded) to raw features.
Dataset apply_normalization(const Dataset& raw, const Normalization& norm);

/// Synthetic stand-in with a Spambase-like shape: two classes with
/// class-dependent means on a subset of features, heavy-tailed scales, and
/// the requested positive ratio. For smoke tests and demos only.
struct SyntheticClassificationSpec {
  std::size_t samples = 4601;
  int features = kSpambaseFeatures;
  double positive_ratio = 0.394;
  double separation = 1.0;
  std::uint64_t seed = 7;

  bool operator==(const SyntheticClassificationSpec&) const = default;
};
Dataset make_synthetic_classification(const SyntheticClassificationSpec& spec);

/// Quadratic-family data: samples drawn around `center_norm * e_1` with
/// isotropic spread; labels are all zero.
struct SyntheticQuadraticSpec {
  std::size_t workers = 10;
  std::size_t shard_size = 5;
  int dim = 5;
  double spread = 0.05;
  double center_norm = 1.0;
  std::uint64_t seed = 1;

  bool operator==(const SyntheticQuadraticSpec&) const = default;
};
Dataset make_quadratic_family_data(const SyntheticQuadraticSpec& spec);

}  // namespace robustdl
