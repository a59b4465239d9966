#pragma once

#include <span>
#include <string>
#include <vector>

#include "quditfuse/types.hpp"

namespace quditfuse {

/// Local dimension of a qudit. The root of unity is always derived from d.
class QuditDim {
 public:
  explicit QuditDim(int d);

  int value() const noexcept { return d_; }
  /// exp(2*pi*i/d)
  Complex omega() const noexcept;
  /// omega^e, with e reduced mod d first so large exponents stay exact.
  Complex omega_pow(long long e) const noexcept;

  friend bool operator==(QuditDim, QuditDim) = default;

 private:
  int d_;
};

struct Subsystem {
  std::string label;
  int dim = 1;

  friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

/// Dense state vector over an ordered tensor product of labeled subsystems.
///
/// Basis index order is row-major over the declared subsystem order: the
/// first subsystem is the most significant digit. Every module in this
/// library uses this one convention.
class PureState {
 public:
  /// Throws InvalidInput unless the squared norm is 1 within kNormTolerance.
  static PureState normalized(std::vector<Subsystem> subsystems, CVector amplitudes);
  /// Accepts any norm; the state carries is_normalized() == false.
  static PureState unnormalized(std::vector<Subsystem> subsystems, CVector amplitudes);

  const std::vector<Subsystem>& subsystems() const noexcept { return subsystems_; }
  const CVector& amplitudes() const noexcept { return amplitudes_; }
  bool is_normalized() const noexcept { return normalized_; }

  std::size_t size() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  std::size_t subsystem_count() const noexcept { return subsystems_.size(); }

  /// Position of a subsystem label; throws InvalidInput if absent.
  std::size_t index_of(const std::string& label) const;
  bool has(const std::string& label) const noexcept;

  std::vector<int> dims() const;
  /// Flat index of a multi-index given in declared subsystem order.
  std::size_t flat_index(std::span<const int> digits) const;
  /// Inverse of flat_index.
  std::vector<int> digits(std::size_t flat) const;

  Complex amplitude(std::span<const int> digits) const { return amplitudes_(static_cast<Eigen::Index>(flat_index(digits))); }

  /// Same state with subsystems reordered; order[i] is the old position of
  /// the new i-th subsystem.
  PureState permuted(std::span<const std::size_t> order) const;

  /// Amplitudes as a matrix whose rows run over the listed subsystems (in
  /// the given order) and whose columns run over the remaining ones (in
  /// declared order).
  CMatrix as_matrix(std::span<const std::string> row_labels) const;

  double norm() const { return amplitudes_.norm(); }

 private:
  PureState(std::vector<Subsystem> subsystems, CVector amplitudes, bool normalized);

  std::vector<Subsystem> subsystems_;
  CVector amplitudes_;
  bool normalized_;
};

/// Product of the listed dimensions, throwing CapacityExceeded above cap.
std::size_t checked_product(std::span<const int> dims, std::size_t cap = kDefaultAmplitudeCap);

}  // namespace quditfuse
