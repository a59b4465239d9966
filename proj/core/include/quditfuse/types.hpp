#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace quditfuse {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Caller handed in something malformed: bad shapes, unknown labels,
/// non-unitary matrices, invalid graphs.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested object would exceed a configured size cap.
class CapacityExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A numerical check that should hold by construction failed.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default cap on the number of complex amplitudes held by one dense state.
inline constexpr std::size_t kDefaultAmplitudeCap = std::size_t{1} << 24;

/// Tolerance used when validating unitarity of interferometers.
inline constexpr double kUnitarityTolerance = 1e-10;

/// Tolerance used when validating normalization of pure states.
inline constexpr double kNormTolerance = 1e-12;

}  // namespace quditfuse
