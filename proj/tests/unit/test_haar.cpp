#include <doctest.h>

#include "quditfuse/haar.hpp"

using namespace quditfuse;

TEST_CASE("one mode is a phase") {
  HaarSampler s(3);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(std::abs(s.next_matrix(1)(0, 0)) - 1.0) < 1e-15);
}

TEST_CASE("samples are unitary and reproducible") {
  HaarSampler a(42);
  HaarSampler b(42);
  for (int i = 0; i < 50; ++i) {
    const CMatrix u = a.next_matrix(5);
    CHECK(unitarity_defect(u) < 1e-10);
    CHECK((u - b.next_matrix(5)).cwiseAbs().maxCoeff() == 0.0);
  }
  HaarSampler c(43);
  CHECK((HaarSampler(42).next_matrix(3) - c.next_matrix(3)).norm() > 1e-3);
}

TEST_CASE("first and second moments") {
  HaarSampler s(7);
  const int n = 10000;
  double m1 = 0.0;
  double m2 = 0.0;
  Complex phase = 0.0;
  for (int i = 0; i < n; ++i) {
    const CMatrix u = haar_sample(s, 4).matrix();
    const double p = std::norm(u(0, 0));
    m1 += p;
    m2 += p * p;
    phase += u(1, 1);
  }
  CHECK(m1 / n == doctest::Approx(0.25).epsilon(0.04));
  // E|U_11|^4 = 2 / (K (K + 1)); a missing phase fix would skew this.
  CHECK(m2 / n == doctest::Approx(0.1).epsilon(0.06));
  CHECK(std::abs(phase) / n < 0.02);
}
