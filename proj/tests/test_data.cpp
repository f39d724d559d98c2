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

#include "robustdl/data.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace robustdl;

namespace {

// Spambase class balance: 1813 spam, 2788 non-spam.
Dataset spambase_shaped(std::uint64_t seed) {
  gen::Rng r(seed);
  Dataset ds;
  ds.features.resize(4601, kSpambaseFeatures);
  ds.labels.resize(4601);
  for (Eigen::Index j = 0; j < 4601; ++j) {
    for (Eigen::Index k = 0; k < kSpambaseFeatures; ++k) ds.features(j, k) = r.normal() * static_cast<double>(k + 1);
    ds.labels[j] = j < 1813 ? 1.0 : 0.0;
  }
  return ds;
}

std::string row(const std::vector<double>& x, int label) {
  std::ostringstream os;
  for (double v : x) os << v << ',';
  os << label << '\n';
  return os.str();
}

}  // namespace

TEST_CASE("parse a small labelled CSV") {
  std::istringstream in(row({1, 2, 3}, 1) + "\n" + row({4.5, -1e-3, 0}, 0));
  const auto ds = parse_labelled_csv(in, "mem", 3);
  CHECK(ds.size() == 2);
  CHECK(ds.dim() == 3);
  CHECK(ds.features(1, 1) == -1e-3);
  CHECK(ds.label(0) == 1.0);
  CHECK(ds.label(1) == 0.0);
  CHECK_FALSE(ds.normalization.applied);
}

TEST_CASE("parse a full-width file") {
  std::string text;
  for (int j = 0; j < 4601; ++j) text += row(std::vector<double>(57, 0.5 * j), j % 2);
  std::istringstream in(text);
  const auto ds = parse_labelled_csv(in, "mem");
  CHECK(ds.size() == 4601);
  CHECK(ds.dim() == 57);
}

TEST_CASE("format errors") {
  std::istringstream empty("");
  CHECK_THROWS_WITH_AS(parse_labelled_csv(empty, "mem", 3), doctest::Contains("no data rows"), FormatError);

  std::istringstream bad_token(row({1, 2, 3}, 1) + "1,abc,3,0\n");
  CHECK_THROWS_WITH_AS(parse_labelled_csv(bad_token, "mem", 3), doctest::Contains("line 2"), FormatError);

  std::istringstream short_row("1,2,0\n");
  CHECK_THROWS_AS(parse_labelled_csv(short_row, "mem", 3), FormatError);

  std::istringstream bad_label("1,2,3,2\n");
  CHECK_THROWS_AS(parse_labelled_csv(bad_label, "mem", 3), FormatError);

  CHECK_THROWS_AS(load_spambase("/nonexistent/spambase.data"), FormatError);
}

TEST_CASE("spambase-shaped split: 20 shards of 153") {
  set_warnings_enabled(false);
  const auto split = split_and_shard(spambase_shaped(1), SplitOptions{});
  set_warnings_enabled(true);
  // Per-class rounding: llround(1813 * 2/3) + llround(2788 * 2/3) = 1209 + 1859.
  const std::size_t train_rows = static_cast<std::size_t>(std::llround(1813 * 2.0 / 3.0) + std::llround(2788 * 2.0 / 3.0));
  CHECK(train_rows == 3068);
  CHECK(split.workers == 20);
  CHECK(split.shard_size == 153);
  CHECK(split.train.size() == 3060);
  CHECK(split.dropped == train_rows - 3060);
  CHECK(split.test.size() == 4601 - train_rows);
  CHECK(split.train.dim() == 58);  // bias appended
}

TEST_CASE("single worker keeps the full training split") {
  const auto split = split_and_shard(spambase_shaped(2), SplitOptions{2.0 / 3.0, 1, 0, true, true});
  CHECK(split.shard_size == split.train.size());
  CHECK(split.dropped == 0);
}

TEST_CASE("seeds change shard contents, not sizes") {
  set_warnings_enabled(false);
  const auto ds = spambase_shaped(3);
  SplitOptions a;
  a.seed = 1;
  SplitOptions b;
  b.seed = 2;
  const auto s1 = split_and_shard(ds, a);
  const auto s2 = split_and_shard(ds, b);
  const auto s1_again = split_and_shard(ds, a);
  set_warnings_enabled(true);
  CHECK(s1.shard_size == s2.shard_size);
  CHECK(s1.train.size() == s2.train.size());
  CHECK((s1.train.features - s2.train.features).norm() > 0.0);
  CHECK((s1.train.features - s1_again.train.features).norm() == 0.0);
  CHECK((s1.test.features - s1_again.test.features).norm() == 0.0);
}

TEST_CASE("property: stratification") {
  gen::Rng r(61);
  set_warnings_enabled(false);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = r.index(30, 400);
    Dataset ds;
    ds.features.resize(static_cast<Eigen::Index>(n), 3);
    ds.labels.resize(static_cast<Eigen::Index>(n));
    const double p = r.uniform(0.1, 0.9);
    for (std::size_t j = 0; j < n; ++j) {
      ds.features.row(static_cast<Eigen::Index>(j)) = r.vector(3).transpose();
      ds.labels[static_cast<Eigen::Index>(j)] = r.coin(p) ? 1.0 : 0.0;
    }
    SplitOptions opts;
    opts.workers = 1;
    opts.seed = rep;
    const auto split = split_and_shard(ds, opts);
    const double bound = 1.0 / static_cast<double>(std::min(split.train.size(), split.test.size()));
    CHECK(std::abs(split.train.positive_ratio() - split.test.positive_ratio()) <= bound);
    CHECK(split.train.size() + split.test.size() == n);
  }
  set_warnings_enabled(true);
}

TEST_CASE("standardization uses training statistics") {
  set_warnings_enabled(false);
  Dataset ds = spambase_shaped(4);
  ds.features.col(5).setConstant(3.0);  // zero variance
  SplitOptions opts;
  opts.workers = 1;
  const auto split = split_and_shard(ds, opts);
  set_warnings_enabled(true);
  const auto& f = split.train.features;
  for (Eigen::Index k = 0; k < kSpambaseFeatures; ++k) {
    const double mean = f.col(k).mean();
    const double var = (f.col(k).array() - mean).square().mean();
    CHECK(std::abs(mean) <= 1e-12);
    if (k == 5) {
      CHECK(f.col(k).norm() == 0.0);
      CHECK(split.test.features.col(k).norm() == 0.0);
    } else {
      CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK((f.col(kSpambaseFeatures).array() == 1.0).all());
  CHECK(split.train.normalization.applied);
  CHECK(split.train.normalization.stddev[5] == 0.0);
  // Test rows use the same mean and scale.
  const auto& norm = split.test.normalization;
  const Dataset again = apply_normalization(ds.select({0}), norm);
  CHECK(again.dim() == kSpambaseFeatures + 1);
}

TEST_CASE("split errors") {
  Dataset tiny;
  tiny.features = RowMatrixXd::Ones(6, 2);
  tiny.labels = (VectorXd(6) << 0, 1, 0, 1, 0, 1).finished();
  SplitOptions opts;
  opts.workers = 5;
  CHECK_THROWS_AS(split_and_shard(tiny, opts), ConfigError);
  opts.workers = 0;
  CHECK_THROWS_AS(split_and_shard(tiny, opts), ConfigError);
  opts.workers = 1;
  opts.train_fraction = 1.0;
  CHECK_THROWS_AS(split_and_shard(tiny, opts), ConfigError);
  tiny.features(0, 0) = NAN;
  opts.train_fraction = 0.5;
  CHECK_THROWS_AS(split_and_shard(tiny, opts), NumericError);
}

TEST_CASE("synthetic generators") {
  const auto ds = make_synthetic_classification(SyntheticClassificationSpec{});
  CHECK(ds.size() == 4601);
  CHECK(ds.dim() == 57);
  CHECK(ds.positive_ratio() == doctest::Approx(0.394).epsilon(1e-3));
  const auto again = make_synthetic_classification(SyntheticClassificationSpec{});
  CHECK((ds.features - again.features).norm() == 0.0);

  const auto q = make_quadratic_family_data(SyntheticQuadraticSpec{});
  CHECK(q.size() == 50);
  CHECK(q.dim() == 5);
  CHECK(q.labels.norm() == 0.0);
}

TEST_CASE("slice and select") {
  const auto ds = make_quadratic_family_data(SyntheticQuadraticSpec{});
  const auto s = ds.slice(10, 15);
  CHECK(s.size() == 5);
  CHECK((s.sample(0) - ds.sample(10)).norm() == 0.0);
  const auto sel = ds.select({3, 1});
  CHECK((sel.sample(1) - ds.sample(1)).norm() == 0.0);
  CHECK_THROWS_AS(ds.slice(40, 60), ConfigError);
  CHECK_THROWS_AS(ds.select({50}), ConfigError);
}
