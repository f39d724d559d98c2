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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <string_view>

namespace robustdl {

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw ConfigError("dataset slice out of range");
  Dataset out;
  const auto b = static_cast<Eigen::Index>(begin);
  const auto n = static_cast<Eigen::Index>(end - begin);
  out.features = features.middleRows(b, n);
  out.labels = labels.segment(b, n);
  out.source = source;
  out.normalization = normalization;
  return out;
}

Dataset Dataset::select(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), dim());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= size()) throw ConfigError("dataset row index out of range");
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels[static_cast<Eigen::Index>(i)] = labels[static_cast<Eigen::Index>(rows[i])];
  }
  out.source = source;
  out.normalization = normalization;
  return out;
}

double Dataset::positive_ratio() const {
  if (size() == 0) return 0.0;
  return labels.sum() / static_cast<double>(size());
}

void Dataset::validate() const {
  if (features.rows() != labels.size()) throw StructuralError("feature rows and label count differ");
  if (!features.allFinite()) throw NumericError("dataset contains non-finite features");
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) throw FormatError("label at row " + std::to_string(i) + " is not 0/1");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view token, std::size_t line, std::size_t column) {
  token = trim(token);
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw FormatError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                      ": not a finite number: '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

Dataset parse_labelled_csv(std::istream& in, const std::string& source, int expected_features) {
  const std::size_t columns = static_cast<std::size_t>(expected_features) + 1;
  std::vector<double> values;
  std::vector<double> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::string_view rest(line);
    std::size_t column = 0;
    while (true) {
      const auto comma = rest.find(',');
      const auto token = rest.substr(0, comma);
      ++column;
      if (column > columns) break;
      const double v = parse_number(token, line_no, column);
      if (column == columns) {
        if (v != 0.0 && v != 1.0) {
          throw FormatError("line " + std::to_string(line_no) + ": label must be 0 or 1");
        }
        labels.push_back(v);
      } else {
        values.push_back(v);
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (column != columns) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                        " columns, found " + (column > columns ? "more" : std::to_string(column)));
    }
  }
  if (labels.empty()) throw FormatError(source + ": no data rows");

  Dataset ds;
  ds.source = source;
  ds.features = Eigen::Map<const RowMatrixXd>(values.data(), static_cast<Eigen::Index>(labels.size()),
                                              expected_features);
  ds.labels = Eigen::Map<const VectorXd>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  return ds;
}

Dataset load_spambase(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return parse_labelled_csv(in, path, kSpambaseFeatures);
}

Dataset apply_normalization(const Dataset& raw, const Normalization& norm) {
  Dataset out = raw;
  if (norm.applied) {
    if (norm.mean.size() != raw.dim() || norm.stddev.size() != raw.dim()) {
      throw StructuralError("normalization dimension mismatch");
    }
    for (Eigen::Index k = 0; k < raw.dim(); ++k) {
      if (norm.stddev[k] > 0.0) {
        out.features.col(k) = (raw.features.col(k).array() - norm.mean[k]) / norm.stddev[k];
      } else {
        out.features.col(k).setZero();
      }
    }
  }
  if (norm.bias_appended) {
    out.features.conservativeResize(Eigen::NoChange, raw.dim() + 1);
    out.features.col(raw.dim()).setOnes();
  }
  out.normalization = norm;
  return out;
}

TrainTestSplit split_and_shard(const Dataset& ds, const SplitOptions& opts) {
  ds.validate();
  if (opts.workers < 1) throw ConfigError("worker count must be >= 1");
  if (!(opts.train_fraction > 0.0) || !(opts.train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }

  std::mt19937_64 rng(opts.seed);
  std::vector<std::size_t> by_class[2];
  for (std::size_t j = 0; j < ds.size(); ++j) by_class[ds.label(j) == 1.0 ? 1 : 0].push_back(j);

  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  for (auto& rows : by_class) {
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(opts.train_fraction * static_cast<double>(rows.size())));
    train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_rows.insert(test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  if (opts.workers > train_rows.size()) {
    throw ConfigError("worker count " + std::to_string(opts.workers) + " exceeds training size " +
                      std::to_string(train_rows.size()));
  }

  Normalization norm;
  norm.bias_appended = opts.append_bias;
  if (opts.standardize) {
    norm.applied = true;
    const Dataset train_raw = ds.select(train_rows);
    const auto n = static_cast<double>(train_raw.size());
    norm.mean = train_raw.features.colwise().sum().transpose() / n;
    norm.stddev.resize(ds.dim());
    for (Eigen::Index k = 0; k < ds.dim(); ++k) {
      const double var = (train_raw.features.col(k).array() - norm.mean[k]).square().sum() / n;
      norm.stddev[k] = var > 0.0 ? std::sqrt(var) : 0.0;
    }
  }

  std::shuffle(train_rows.begin(), train_rows.end(), rng);
  TrainTestSplit out;
  out.workers = opts.workers;
  out.shard_size = train_rows.size() / opts.workers;
  out.dropped = train_rows.size() - out.shard_size * opts.workers;
  if (out.dropped > 0) {
    log_warning("dropping " + std::to_string(out.dropped) + " training rows so " + std::to_string(opts.workers) +
                " workers hold equal shards");
    train_rows.resize(out.shard_size * opts.workers);
  }
  out.train = apply_normalization(ds.select(train_rows), norm);
  out.test = apply_normalization(ds.select(test_rows), norm);
  return out;
}

Dataset make_synthetic_classification(const SyntheticClassificationSpec& spec) {
  if (spec.features < 1 || spec.samples < 2) throw ConfigError("synthetic dataset too small");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const int informative = std::max(1, spec.features / 6);
  VectorXd scale(spec.features);
  VectorXd shift = VectorXd::Zero(spec.features);
  for (int k = 0; k < spec.features; ++k) scale[k] = std::exp(4.0 * uniform(rng) - 1.0);
  const double per_feature = 2.8 * spec.separation / std::sqrt(static_cast<double>(informative));
  for (int k = 0; k < informative; ++k) shift[k] = (k % 3 == 2 ? -1.0 : 1.0) * per_feature;

  const auto positives = static_cast<std::size_t>(std::llround(spec.positive_ratio * static_cast<double>(spec.samples)));
  Dataset ds;
  ds.source = "synthetic-classification";
  ds.features.resize(static_cast<Eigen::Index>(spec.samples), spec.features);
  ds.labels.resize(static_cast<Eigen::Index>(spec.samples));
  for (std::size_t j = 0; j < spec.samples; ++j) {
    const double y = j < positives ? 1.0 : 0.0;
    for (int k = 0; k < spec.features; ++k) {
      // Occasional outliers mimic the long tails of word-frequency features.
      const double noise = uniform(rng) < 0.02 ? 4.0 * normal(rng) : normal(rng);
      ds.features(static_cast<Eigen::Index>(j), k) = scale[k] * (y * shift[k] + noise);
    }
    ds.labels[static_cast<Eigen::Index>(j)] = y;
  }
  return ds;
}

Dataset make_quadratic_family_data(const SyntheticQuadraticSpec& spec) {
  if (spec.workers < 1 || spec.shard_size < 1 || spec.dim < 1) throw ConfigError("empty quadratic family data");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = spec.workers * spec.shard_size;
  Dataset ds;
  ds.source = "synthetic-quadratic";
  ds.features.resize(static_cast<Eigen::Index>(n), spec.dim);
  ds.labels = VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (int k = 0; k < spec.dim; ++k) {
      ds.features(static_cast<Eigen::Index>(j), k) = (k == 0 ? spec.center_norm : 0.0) + spec.spread * normal(rng);
    }
  }
  return ds;
}

}  // namespace robustdl
