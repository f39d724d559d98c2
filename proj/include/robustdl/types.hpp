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

#include <Eigen/Core>

#include <atomic>
#include <iostream>
#include <stdexcept>
#include <string>

namespace robustdl {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// One sample per row.
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VectorXd = Vector<double>;
using RowMatrixXd = RowMatrix<double>;

/// Base class for every error raised by the library. `what()` carries the
/// full context; `kind()` lets callers branch without string matching.
class Error : public std::runtime_error {
 public:
  enum class Kind { kStructural, kConfig, kNumeric, kRegime, kFormat, kBoundInapplicable };

  Error(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Inputs with mismatched shapes.
class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& m) : Error(Kind::kStructural, m) {}
};

/// Out-of-range configuration values.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(Kind::kConfig, m) {}
};

/// Non-finite inputs or intermediates.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& m) : Error(Kind::kNumeric, m) {}
};

/// A closed-form quantity evaluated outside the parameter regime where it is defined.
class RegimeError : public Error {
 public:
  explicit RegimeError(const std::string& m) : Error(Kind::kRegime, m) {}
};

/// Malformed input files.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& m) : Error(Kind::kFormat, m) {}
};

/// The deviation bound's hypotheses (alpha <= beta, alpha <= 1/2) do not hold.
class BoundInapplicableError : public Error {
 public:
  explicit BoundInapplicableError(const std::string& m) : Error(Kind::kBoundInapplicable, m) {}
};

namespace detail {
inline std::atomic<bool>& warnings_enabled() {
  static std::atomic<bool> enabled{true};
  return enabled;
}
}  // namespace detail

inline void set_warnings_enabled(bool on) { detail::warnings_enabled() = on; }

inline void log_warning(const std::string& message) {
  if (detail::warnings_enabled()) std::clog << "robustdl: warning: " << message << '\n';
}

}  // namespace robustdl
