#include "quditfuse/haar.hpp"

#include <cmath>

namespace quditfuse {

namespace {

CMatrix ginibre(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix z(rows, cols);
  // Fill column-major in a fixed order so the stream is reproducible.
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(r, c) = Complex(re, im);
    }
  }
  return z;
}

}  // namespace

CMatrix haar_unitary(std::mt19937_64& rng, int modes) {
  if (modes < 1) throw InvalidInput("Haar sampling needs at least one mode");
  const CMatrix z = ginibre(rng, modes, modes);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(modes, modes);
  const CMatrix& r = qr.matrixQR();
  for (int j = 0; j < modes; ++j) {
    const Complex diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(j) *= diag / mag;
  }
  return q;
}

Interferometer haar_sample(HaarSampler& sampler, int modes) { return Interferometer(sampler.next_matrix(modes)); }

CVector random_state(std::mt19937_64& rng, int n) {
  CVector v = ginibre(rng, n, 1).col(0);
  return v / v.norm();
}

}  // namespace quditfuse
