#pragma once

#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "quditfuse/types.hpp"

namespace quditfuse {

enum class ModeRoleKind { Unassigned, ClusterLeg, AncillaPhoton, VacuumPad };

/// What feeds an interferometer input row. `source` is the index of the
/// fused input (cluster or ancilla) for leg and ancilla rows, -1 otherwise.
struct ModeRole {
  ModeRoleKind kind = ModeRoleKind::Unassigned;
  int source = -1;

  friend bool operator==(const ModeRole&, const ModeRole&) = default;
};

/// K x K unitary acting on creation operators:
///   a_r^dagger = sum_k U(r, k) c_k^dagger
/// Rows are input channels, columns are detected output modes.
class Interferometer {
 public:
  /// Throws InvalidInput if the matrix is not square or U U^dagger deviates
  /// from the identity by more than kUnitarityTolerance (max-abs entry).
  /// Non-unitary input is rejected, never repaired.
  explicit Interferometer(CMatrix matrix, std::vector<ModeRole> roles = {});

  const CMatrix& matrix() const noexcept { return matrix_; }
  const std::vector<ModeRole>& roles() const noexcept { return roles_; }
  int modes() const noexcept { return static_cast<int>(matrix_.rows()); }

  static Interferometer identity(int modes);

 private:
  CMatrix matrix_;
  std::vector<ModeRole> roles_;
};

/// Max-abs deviation of U U^dagger from the identity.
double unitarity_defect(const CMatrix& u);

/// Row bookkeeping for M photon sources followed by vacuum pads. Source m
/// owns rows [f(m, 0), f(m, 0) + k_m); pads occupy the trailing rows.
/// All indices are zero-based.
class RowLayout {
 public:
  RowLayout(std::vector<int> rows_per_source, int vacuum_pads);

  int sources() const noexcept { return static_cast<int>(rows_.size()); }
  int rows_of(int source) const { return rows_.at(static_cast<std::size_t>(source)); }
  int vacuum_pads() const noexcept { return pads_; }
  int modes() const noexcept { return modes_; }
  const std::vector<int>& rows_per_source() const noexcept { return rows_; }

  /// Interferometer row carrying Schmidt index `i` of source `m`.
  int row(int source, int i) const;

  /// Role labels, given which sources are ancillae.
  std::vector<ModeRole> roles(const std::vector<bool>& is_ancilla) const;

 private:
  std::vector<int> rows_;
  std::vector<int> offsets_;
  int pads_;
  int modes_;
};

/// Multiset of clicked output modes, stored sorted ascending.
class DetectionPattern {
 public:
  DetectionPattern() = default;
  explicit DetectionPattern(std::vector<int> modes);

  const std::vector<int>& modes() const noexcept { return modes_; }
  int photons() const noexcept { return static_cast<int>(modes_.size()); }
  bool collision_free() const noexcept;
  /// Occupation number per mode, for a device with `modes` outputs.
  std::vector<int> occupations(int modes) const;
  /// prod_k n_k!
  double multiplicity_factorial() const noexcept;
  /// Number of distinct modes that clicked.
  int distinct_modes() const noexcept;
  /// Throws InvalidInput if any mode is outside [0, modes).
  void validate(int modes) const;
  /// Mode list joined with '-', e.g. "0-0-3".
  std::string to_string() const;

  friend auto operator<=>(const DetectionPattern&, const DetectionPattern&) = default;
  friend bool operator==(const DetectionPattern&, const DetectionPattern&) = default;

 private:
  std::vector<int> modes_;
};

/// All multisets of `photons` clicks over `modes` outputs, in lexicographic order.
std::vector<DetectionPattern> enumerate_patterns(int modes, int photons);

/// Two-photon coefficient a_{ij,kl} = U_ik U_jl + U_il U_jk. Rows i, j and
/// columns k, l are zero-based matrix indices. For k == l this is the full
/// symmetric sum 2 U_ik U_jk.
Complex coeff_two(const Interferometer& u, int i, int j, int k, int l);

/// Coefficient of prod_m c_{l_m}^dagger in prod_m a_{f(m, i_m)}^dagger |vac>.
/// Sums prod_m U(f(m, i_m), l_{tau(m)}) over distinct arrangements of the
/// pattern, so each repeated-mode assignment is counted once. At M = 2 this
/// equals coeff_two for k != l and coeff_two / 2 for k == l.
Complex coeff_multi(const Interferometer& u, const RowLayout& layout, std::span<const int> inputs,
                    const DetectionPattern& pattern);

/// Sum over all of S_M (no collision identification); equals
/// coeff_multi * prod_k n_k!.
Complex symmetric_sum(const Interferometer& u, const RowLayout& layout, std::span<const int> inputs,
                      const DetectionPattern& pattern);

/// Factor turning the full symmetric sum into the amplitude of the
/// normalized Fock state: 1 / sqrt(prod_k n_k!). Equals 1 for collision-free
/// patterns and sqrt(2)/2 for a double click.
double born_weight(const DetectionPattern& pattern);

/// Amplitude of the normalized Fock state |n_1 .. n_K> for the given input
/// rows: coeff_multi * sqrt(prod_k n_k!).
Complex fock_amplitude(const Interferometer& u, const RowLayout& layout, std::span<const int> inputs,
                       const DetectionPattern& pattern);

/// Brute-force expansion of prod_m (sum_k U(f(m, i_m), k) c_k^dagger) as a
/// polynomial in commuting creation operators. Returns the coefficient of
/// each monomial, without factorial normalization. Independent of the
/// arrangement sums above; limited to M <= 5 photons and K <= 10 modes.
std::map<DetectionPattern, Complex> oracle_expand(const Interferometer& u, const RowLayout& layout,
                                                  std::span<const int> inputs);

/// The 4 x 4 diagonal-PBS unitary of standard qubit type-II fusion,
/// rows (a_H, a_V, b_H, b_V):  1/2 [[1,1,1,-1],[1,1,-1,1],[1,-1,1,1],[-1,1,1,1]].
CMatrix qubit_type2_unitary();

}  // namespace quditfuse
