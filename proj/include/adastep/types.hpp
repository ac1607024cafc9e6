#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adastep {

/// Dense parameter vector. Data may be sparse, parameters never are.
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using Index = std::size_t;

/// Invalid run configuration: bad sizes, missing hyperparameters, unknown keys.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An oracle produced NaN/Inf, or an internal numeric invariant broke.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The supplied lower bound exceeds the minibatch value it should bound.
class LowerBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input text could not be parsed; carries a 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string &what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace adastep
