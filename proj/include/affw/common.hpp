#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace affw {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate a precondition (dimension mismatch,
/// nonpositive constant, non-invertible matrix, point outside the set, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent data: CSV contents, label domains, a membership
/// oracle that turns out to be non-convex.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: NaN objective values, backtracking that never
/// satisfies its sufficient-decrease test, inconsistent optimal values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant was violated (e.g. an infeasible iterate).
class InvariantError : public Error {
 public:
  using Error::Error;
};

using Rng = std::mt19937_64;

/// Direction drawn uniformly on the unit Euclidean sphere.
Vector random_unit_vector(Rng& rng, Eigen::Index dim);

/// Vector with i.i.d. standard normal entries.
Vector random_gaussian(Rng& rng, Eigen::Index dim);

double uniform01(Rng& rng);

inline void require_dim(const Vector& x, Eigen::Index dim, const char* what) {
  if (x.size() != dim) {
    throw InputError(std::string(what) + ": dimension mismatch (expected " +
                     std::to_string(dim) + ", got " +
                     std::to_string(x.size()) + ")");
  }
}

}  // namespace affw
