#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lpm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments: unsupported dimension, malformed input, bad parameter range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Halfspace intersection or hull construction failed (unbounded, empty, degenerate).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A measure violates a hypothesis required by the requested pipeline.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// An iterative method did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Finitely many weighted directions in R^n (directions are unit columns).
struct AtomicMeasure {
  int dim = 0;
  Mat directions;
  Vec masses;

  int size() const { return static_cast<int>(masses.size()); }
  double total() const { return masses.sum(); }
};

/// Volume of the unit ball in R^n.
inline double ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// (n-1)-dimensional area of the unit sphere S^{n-1}.
inline double sphere_area(int n) { return n * ball_volume(n); }

}  // namespace lpm
