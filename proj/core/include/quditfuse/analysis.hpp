#pragma once

#include <span>
#include <string>
#include <vector>

#include "quditfuse/fusion.hpp"

namespace quditfuse {

/// Relative eigenvalue cutoff used for numerical rank.
inline constexpr double kRankTolerance = 1e-10;
/// A herald counts as maximally entangled below this scalar-condition residual.
inline constexpr double kMaxEntangledResidual = 1e-8;

/// Density matrix of one subsystem: Hermitian, PSD, unit trace.
/// Entries follow the usual convention rho(a, b) = sum_r psi(a, r) conj(psi(b, r)).
class ReducedDensity {
 public:
  /// Validates Hermiticity (1e-12), trace (1 +- 1e-12) and eigenvalues >= -1e-12.
  ReducedDensity(std::string kept, CMatrix matrix);

  const std::string& kept() const noexcept { return kept_; }
  const CMatrix& matrix() const noexcept { return matrix_; }
  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }

  /// Ascending eigenvalues.
  const RVector& spectrum() const noexcept { return spectrum_; }

 private:
  std::string kept_;
  CMatrix matrix_;
  RVector spectrum_;
};

/// Partial trace over every subsystem except `keep`. The state must be
/// normalized. Heralded states live in Schmidt coordinates, so the result
/// is expressed in the kept side's Schmidt basis.
ReducedDensity reduced_density(const PureState& state, const std::string& keep);

/// Von Neumann entropy in nats over eigenvalues above 1e-14.
double entropy(const ReducedDensity& rho);

/// Eigenvalues above tol * (largest eigenvalue).
int numerical_rank(const ReducedDensity& rho, double tol = kRankTolerance);

/// ||rho - I/k||_F. Throws InvalidInput unless rho is k x k.
double scalar_condition_residual(const ReducedDensity& rho, int k);

/// Two-photon relevant outcome written as rho = V^dagger A V / k1.
///
/// Uses the transposed convention rho_t(i1, i2) = sum_j c*(i1, j) c(i2, j),
/// with V(0, s) = alpha_s U(s, k), V(1, s) = alpha_s U(s, l) and
///   X(k', l') = (k1 / N^2) sum_j beta_j^2 conj(U(j, k')) U(j, l'),
///   A = [[X_ll, X_lk], [X_kl, X_kk]].
struct FactorizedForm {
  CMatrix v;               ///< 2 x k1
  CMatrix a;               ///< 2 x 2, Hermitian
  CMatrix rho;             ///< rho_t from the fused herald's partial trace
  CMatrix rho_factorized;  ///< V^dagger A V / k1
  double reconstruction_error = 0.0;  ///< ||rho - rho_factorized||_F
  int rank_a = 0;
};

/// `u` in the Schmidt frame with two photon sources. Throws InvalidInput for
/// collision patterns and for zero-probability outcomes.
FactorizedForm factorized_form(const Interferometer& u, const DetectionPattern& pattern,
                               std::span<const SchmidtSource> sources);

/// Explicit witness that rank(rho) <= number of clicked modes. The spanning
/// vectors w_l(i) = alpha_i U(f(m, i), l) span the column space of the
/// herald's amplitude matrix, so every z orthogonal to them lies in ker rho.
struct RankCertificate {
  std::vector<CVector> spanning_vectors;
  std::vector<CVector> kernel_vectors;  ///< orthonormal basis of span(w)^perp
  int kernel_dimension_lower_bound = 0;  ///< max(0, k - M)
  int numerical_rank = 0;
  double tolerance = kRankTolerance;
  double max_kernel_residual = 0.0;  ///< max ||rho z||

  bool holds(double kernel_tol = 1e-9) const;
};

/// Certificate for the reduced density of source `kept` (`rho` must be that
/// source's reduced density of the given outcome's herald).
RankCertificate rank_certificate(const Interferometer& u, std::span<const SchmidtSource> sources, int kept,
                                 const DetectionPattern& pattern, const ReducedDensity& rho,
                                 double rank_tol = kRankTolerance);

}  // namespace quditfuse
