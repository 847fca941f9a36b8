#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace scorecraft {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Bad input: malformed files, inconsistent dimensions, invalid specs.
/// The CLI maps it to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A well-posed computation that could not be completed: infeasible
/// constraints, solver non-convergence, degenerate weights. Exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ValidationError unless `actual == expected`.
void require_size(const char* what, Eigen::Index actual, Eigen::Index expected);

}  // namespace scorecraft
