#include "quditfuse/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace quditfuse {

ReducedDensity::ReducedDensity(std::string kept, CMatrix matrix) : kept_(std::move(kept)), matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    throw InvalidInput("density matrix must be square and non-empty");
  }
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) throw InvalidInput("density matrix is not Hermitian");
  const Complex tr = matrix_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > 1e-12) throw InvalidInput("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(matrix_, Eigen::EigenvaluesOnly);
  spectrum_ = eig.eigenvalues();
  if (spectrum_(0) < -1e-12) throw InvalidInput("density matrix has a negative eigenvalue");
}

ReducedDensity reduced_density(const PureState& state, const std::string& keep) {
  if (!state.is_normalized()) throw InvalidInput("reduced_density needs a normalized state");
  const std::string labels[] = {keep};
  const CMatrix c = state.as_matrix(labels);
  CMatrix rho = c * c.adjoint();
  // Symmetrize away rounding so validation sees an exactly Hermitian matrix.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return ReducedDensity(keep, std::move(rho));
}

double entropy(const ReducedDensity& rho) {
  double s = 0.0;
  for (double lambda : rho.spectrum()) {
    if (lambda > 1e-14) s -= lambda * std::log(lambda);
  }
  return std::max(s, 0.0);  // a lone eigenvalue of 1 + eps gives -0
}

int numerical_rank(const ReducedDensity& rho, double tol) {
  const RVector& ev = rho.spectrum();
  const double largest = ev(ev.size() - 1);
  if (largest <= 0.0) return 0;
  return static_cast<int>((ev.array() > tol * largest).count());
}

double scalar_condition_residual(const ReducedDensity& rho, int k) {
  if (k < 1 || rho.dim() != k) {
    throw InvalidInput("scalar condition needs a " + std::to_string(k) + " x " + std::to_string(k) + " matrix");
  }
  return (rho.matrix() - CMatrix::Identity(k, k) / static_cast<double>(k)).norm();
}

FactorizedForm factorized_form(const Interferometer& u, const DetectionPattern& pattern,
                               std::span<const SchmidtSource> sources) {
  if (sources.size() != 2) throw InvalidInput("factorized form needs exactly two photon sources");
  if (pattern.photons() != 2 || !pattern.collision_free()) {
    throw InvalidInput("factorized form is defined for two-photon relevant outcomes only");
  }
  const auto& alpha = sources[0].coefficients;
  const auto& beta = sources[1].coefficients;
  const int k1 = static_cast<int>(alpha.size());
  const int k2 = static_cast<int>(beta.size());
  const int pads = u.modes() - k1 - k2;

  const FusionOutcome outcome = fuse_outcome(sources, u, pads, pattern, AmplitudePath::General);
  if (!outcome.heralded_state) throw InvalidInput("outcome " + pattern.to_string() + " has zero probability");

  const int k = pattern.modes()[0];
  const int l = pattern.modes()[1];
  const CMatrix& m = u.matrix();

  double n2 = 0.0;
  for (int i = 0; i < k1; ++i) {
    for (int j = 0; j < k2; ++j) {
      const Complex a = m(i, k) * m(k1 + j, l) + m(i, l) * m(k1 + j, k);
      n2 += std::norm(alpha(i) * beta(j) * a);
    }
  }

  auto x = [&](int kp, int lp) {
    Complex acc{};
    for (int j = 0; j < k2; ++j) acc += beta(j) * beta(j) * std::conj(m(k1 + j, kp)) * m(k1 + j, lp);
    return acc * (static_cast<double>(k1) / n2);
  };

  FactorizedForm out;
  out.v.resize(2, k1);
  for (int s = 0; s < k1; ++s) {
    out.v(0, s) = alpha(s) * m(s, k);
    out.v(1, s) = alpha(s) * m(s, l);
  }
  out.a.resize(2, 2);
  out.a << x(l, l), x(l, k), x(k, l), x(k, k);

  const ReducedDensity rho = reduced_density(*outcome.heralded_state, sources[0].label);
  out.rho = rho.matrix().transpose();
  out.rho_factorized = out.v.adjoint() * out.a * out.v / static_cast<double>(k1);
  out.reconstruction_error = (out.rho - out.rho_factorized).norm();

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (out.a + out.a.adjoint()), Eigen::EigenvaluesOnly);
  const RVector ev = eig.eigenvalues().cwiseAbs();
  const double largest = ev.maxCoeff();
  out.rank_a = largest > 0.0 ? static_cast<int>((ev.array() > kRankTolerance * largest).count()) : 0;
  return out;
}

bool RankCertificate::holds(double kernel_tol) const {
  return numerical_rank <= static_cast<int>(spanning_vectors.size()) &&
         static_cast<int>(kernel_vectors.size()) >= kernel_dimension_lower_bound && max_kernel_residual < kernel_tol;
}

RankCertificate rank_certificate(const Interferometer& u, std::span<const SchmidtSource> sources, int kept,
                                 const DetectionPattern& pattern, const ReducedDensity& rho, double rank_tol) {
  if (kept < 0 || kept >= static_cast<int>(sources.size())) throw InvalidInput("kept source index out of range");
  std::vector<int> ranks;
  int total = 0;
  for (const auto& s : sources) {
    ranks.push_back(static_cast<int>(s.coefficients.size()));
    total += ranks.back();
  }
  const RowLayout layout(ranks, u.modes() - total);
  pattern.validate(u.modes());
  const auto& alpha = sources[static_cast<std::size_t>(kept)].coefficients;
  const int k = static_cast<int>(alpha.size());
  if (rho.dim() != k) throw InvalidInput("density matrix size does not match the kept source's Schmidt rank");

  RankCertificate cert;
  cert.tolerance = rank_tol;
  std::vector<int> distinct = pattern.modes();
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  CMatrix w(k, static_cast<Eigen::Index>(distinct.size()));
  for (std::size_t c = 0; c < distinct.size(); ++c) {
    for (int i = 0; i < k; ++i) w(i, static_cast<Eigen::Index>(c)) = alpha(i) * u.matrix()(layout.row(kept, i), distinct[c]);
    cert.spanning_vectors.push_back(w.col(static_cast<Eigen::Index>(c)));
  }
  cert.kernel_dimension_lower_bound = std::max(0, k - pattern.photons());

  Eigen::JacobiSVD<CMatrix> svd(w, Eigen::ComputeFullU);
  const RVector& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > 1e-12 * std::max(top, 1e-300)) ++r;
  const CMatrix& basis = svd.matrixU();
  for (Eigen::Index c = r; c < k; ++c) {
    const CVector z = basis.col(c);
    cert.kernel_vectors.push_back(z);
    cert.max_kernel_residual = std::max(cert.max_kernel_residual, (rho.matrix() * z).norm());
  }
  cert.numerical_rank = numerical_rank(rho, rank_tol);
  return cert;
}

}  // namespace quditfuse
