// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cevnorm {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (t <= 0, p outside (0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition on sample size or configuration does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration. `path` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Filesystem or parse failure on an input/output file.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Problems with the content of a data set (missing column, all ties, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Requested allocation exceeds the configured memory budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A sample was paired with a model it was not drawn from.
class MismatchError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical method stopped without meeting its tolerance.
/// Carries the best estimate reached and the remaining error estimate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double error_estimate)
      : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}
  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

}  // namespace cevnorm
