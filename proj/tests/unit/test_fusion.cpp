#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "quditfuse/analysis.hpp"
#include "quditfuse/fusion.hpp"
#include "quditfuse/haar.hpp"
#include "test_support.hpp"

using namespace quditfuse;
using qf_test::bell_cluster;
using qf_test::random_cluster;

namespace {

struct PhysicalInput {
  CMatrix psi;  // remainder x leg amplitudes; one row for an ancilla
  bool ancilla = false;
};

PhysicalInput physical_of(const FusionInput& in) {
  if (const auto* c = std::get_if<ClusterInput>(&in)) {
    const std::string rows[] = {"r"};
    return {c->state().as_matrix(rows), false};
  }
  const auto& a = std::get<AncillaInput>(in);
  return {CMatrix(a.leg_state().transpose()), true};
}

Complex perm_sum(const CMatrix& u, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> tau(cols.size());
  std::iota(tau.begin(), tau.end(), 0);
  Complex s = 0.0;
  do {
    Complex t = 1.0;
    for (std::size_t m = 0; m < rows.size(); ++m) t *= u(rows[m], cols[static_cast<std::size_t>(tau[m])]);
    s += t;
  } while (std::next_permutation(tau.begin(), tau.end()));
  return s;
}

// Unnormalized herald over the cluster remainders (row-major, input order),
// from expanding each physical photon through U directly.
CVector oracle_herald(const std::vector<FusionInput>& inputs, const CMatrix& u, const DetectionPattern& p) {
  std::vector<PhysicalInput> phys;
  std::vector<int> offsets;
  int offset = 0;
  for (const auto& in : inputs) {
    phys.push_back(physical_of(in));
    offsets.push_back(offset);
    offset += static_cast<int>(phys.back().psi.cols());
  }
  std::vector<int> rem_dims;
  for (const auto& ph : phys) {
    if (!ph.ancilla) rem_dims.push_back(static_cast<int>(ph.psi.rows()));
  }
  const int rem_total = std::accumulate(rem_dims.begin(), rem_dims.end(), 1, std::multiplies<>());
  const std::size_t m_count = phys.size();
  double fact = 1.0;
  for (int n : p.occupations(static_cast<int>(u.rows()))) {
    for (int i = 2; i <= n; ++i) fact *= i;
  }

  CVector out = CVector::Zero(rem_total);
  std::vector<int> legs(m_count, 0);
  std::vector<int> rems(m_count, 0);
  for (int r = 0; r < rem_total; ++r) {
    int rest = r;
    for (std::size_t m = m_count; m-- > 0;) {
      if (phys[m].ancilla) {
        rems[m] = 0;
        continue;
      }
      const int dim = static_cast<int>(phys[m].psi.rows());
      rems[m] = rest % dim;
      rest /= dim;
    }
    // Sum over every assignment of physical leg modes.
    std::fill(legs.begin(), legs.end(), 0);
    while (true) {
      Complex w = 1.0;
      std::vector<int> rows;
      for (std::size_t m = 0; m < m_count; ++m) {
        w *= phys[m].psi(rems[m], legs[m]);
        rows.push_back(offsets[m] + legs[m]);
      }
      if (w != Complex{}) out(r) += w * perm_sum(u, rows, p.modes()) / std::sqrt(fact);
      std::size_t m = 0;
      for (; m < m_count; ++m) {
        if (++legs[m] < phys[m].psi.cols()) break;
        legs[m] = 0;
      }
      if (m == m_count) break;
    }
  }
  return out;
}

std::vector<FusionInput> two_bells(int d) { return {bell_cluster(d), bell_cluster(d)}; }

double relevant_total(const std::vector<FusionOutcome>& outs) {
  double s = 0.0;
  for (const auto& o : outs) {
    if (o.relevant) s += o.probability;
  }
  return s;
}

}  // namespace

TEST_CASE("Schmidt decomposition") {
  SUBCASE("product state") {
    CVector amps = qf_test::kron(CVector(CVector::Unit(2, 1)), CVector(CVector::Constant(3, 1.0 / std::sqrt(3.0))));
    const auto s = PureState::normalized({{"a", 2}, {"b", 3}}, amps);
    const std::string left[] = {"a"};
    const auto f = schmidt_decompose(s, left);
    CHECK(f.rank() == 1);
    CHECK(f.coefficients(0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("qubit edge") {
    const auto c = bell_cluster(2);
    CHECK(c.schmidt().rank() == 2);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(c.schmidt().coefficients(i) - std::sqrt(0.5)) < 1e-14);
  }
  SUBCASE("end of a qutrit path") {
    const QuditGraph g(QuditDim(3), {"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"c", "d"}});
    const ClusterInput c(build_graph_state(g), "d");
    CHECK(c.schmidt().rank() == 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(c.schmidt().coefficients(i) - 1.0 / std::sqrt(3.0)) < 1e-14);
    CHECK(c.schmidt().left.size() == 3);
  }
  SUBCASE("random states reconstruct and sort") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
      const auto c = random_cluster(rng, 3, 4);
      const auto& f = c.schmidt();
      CHECK(std::is_sorted(f.coefficients.data(), f.coefficients.data() + f.rank(), std::greater<>()));
      CHECK(f.coefficients.squaredNorm() == doctest::Approx(1.0).epsilon(1e-13));
      const std::string rows[] = {"r"};
      CHECK((f.reconstruct() - c.state().as_matrix(rows)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("bad cuts") {
    const auto s = bell_cluster(2).state();
    CHECK_THROWS_AS(schmidt_decompose(s, std::vector<std::string>{}), InvalidInput);
    CHECK_THROWS_AS(schmidt_decompose(s, std::vector<std::string>{"r", "leg"}), InvalidInput);
    CHECK_THROWS_AS(schmidt_decompose(s, std::vector<std::string>{"zz"}), InvalidInput);
  }
}

TEST_CASE("qubit type-II fusion succeeds half the time") {
  const auto inputs = two_bells(2);
  const Interferometer pbs(qubit_type2_unitary());
  for (const auto& outs : {fuse_physical(inputs, pbs, 0), fuse(inputs, pbs, 0)}) {
    CHECK(std::abs(relevant_total(outs) - 0.5) < 1e-12);
    double total = 0.0;
    for (const auto& o : outs) {
      total += o.probability;
      if (!o.heralded_state) continue;
      const ReducedDensity rho = reduced_density(*o.heralded_state, "V1");
      if (o.relevant) {
        CHECK(std::abs(entropy(rho) - std::log(2.0)) < 1e-9);
      } else {
        CHECK(numerical_rank(rho) == 1);
      }
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("identity interferometer routes each photon to its own detector") {
  std::mt19937_64 rng(8);
  const auto c1 = random_cluster(rng, 3, 3);
  const auto c2 = random_cluster(rng, 3, 3);
  const std::vector<FusionInput> inputs{c1, c2};
  const auto outs = fuse(inputs, Interferometer::identity(6), 0);
  const RVector& a = c1.schmidt().coefficients;
  const RVector& b = c2.schmidt().coefficients;
  for (const auto& o : outs) {
    const int k = o.pattern.modes()[0];
    const int l = o.pattern.modes()[1];
    if (k < 3 && l >= 3) {
      CHECK(std::abs(o.probability - a(k) * a(k) * b(l - 3) * b(l - 3)) < 1e-14);
      const int digits[] = {k, l - 3};
      CHECK(std::abs(std::abs(o.heralded_state->amplitude(digits)) - 1.0) < 1e-12);
    } else {
      CHECK(o.probability < 1e-15);
      CHECK_FALSE(o.heralded_state.has_value());
    }
    if (k < 3 && l >= 3) {
      const auto id = Interferometer::identity(6);
      CHECK(coeff_two(id, k, l, k, l) == Complex(1.0));
      CHECK(coeff_two(id, (k + 1) % 3, l, k, l) == Complex(0.0));
    }
  }
}

TEST_CASE("probability of a relevant outcome from the two-photon formula") {
  const auto inputs = two_bells(2);
  const auto sources = schmidt_sources(inputs);
  const Interferometer u(qubit_type2_unitary());
  const auto outs = fuse(std::span<const SchmidtSource>(sources), u, 0);
  for (const auto& o : outs) {
    if (!o.relevant) continue;
    const int k = o.pattern.modes()[0];
    const int l = o.pattern.modes()[1];
    double p = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        p += std::norm(sources[0].coefficients(i) * sources[1].coefficients(j) * coeff_two(u, i, j + 2, k, l));
      }
    }
    CHECK(std::abs(outcome_probability(o) - p) < 1e-14);
    CHECK(std::abs(o.norm_factor * o.norm_factor - o.probability) < 1e-14);
  }
}

TEST_CASE("collision probability carries the factor one half") {
  HaarSampler sampler(31);
  std::mt19937_64 rng(32);
  // A 2 x 3 cluster has two Schmidt rows, so K = 2 + 3.
  const std::vector<FusionInput> inputs{random_cluster(rng, 2, 3), random_cluster(rng, 3, 3)};
  const auto sources = schmidt_sources(inputs);
  const Interferometer u = haar_sample(sampler, 5);
  for (const auto& o : fuse(std::span<const SchmidtSource>(sources), u, 0)) {
    if (o.relevant) continue;
    const int k = o.pattern.modes()[0];
    double x = 0.0;
    double y = 0.0;
    for (int i = 0; i < 2; ++i) x += std::norm(sources[0].coefficients(i) * u.matrix()(i, k));
    for (int j = 0; j < 3; ++j) y += std::norm(sources[1].coefficients(j) * u.matrix()(j + 2, k));
    CHECK(std::abs(o.probability - 2.0 * x * y) < 1e-14);
    CHECK(std::abs(o.probability - o.norm_factor * o.norm_factor / 2.0) < 1e-14);
  }
}

TEST_CASE("physical-photon oracle agrees with fuse") {
  std::mt19937_64 rng(55);
  HaarSampler sampler(56);
  struct Case {
    int d;
    int ancillae;
    int pads;
  };
  for (const Case cs : {Case{2, 0, 0}, Case{3, 0, 1}, Case{3, 1, 0}, Case{2, 2, 1}, Case{4, 1, 0}}) {
    CAPTURE(cs.d);
    CAPTURE(cs.ancillae);
    std::vector<FusionInput> inputs{random_cluster(rng, 2, cs.d), random_cluster(rng, 3, cs.d)};
    for (int a = 0; a < cs.ancillae; ++a) inputs.emplace_back(AncillaInput(random_state(rng, cs.d)));
    const int k = (2 + cs.ancillae) * cs.d + cs.pads;
    const Interferometer u = haar_sample(sampler, k);
    double total = 0.0;
    for (const auto& o : fuse_physical(inputs, u, cs.pads)) {
      const CVector want = oracle_herald(inputs, u.matrix(), o.pattern);
      CHECK(std::abs(o.probability - want.squaredNorm()) < 1e-12);
      total += o.probability;
      if (o.heralded_state) {
        const CVector got = heralded_in_remainder_basis(*o.heralded_state, inputs).amplitudes();
        CHECK(qf_test::overlap(got, want / want.norm()) > 1.0 - 1e-10);
      }
    }
    CHECK(std::abs(total - 1.0) < 1e-10);
  }
}

TEST_CASE("ancilla states matter on physical modes") {
  HaarSampler sampler(3);
  const Interferometer u = haar_sample(sampler, 9);
  const std::vector<FusionInput> zero{bell_cluster(3), bell_cluster(3), AncillaInput::basis(3, 0)};
  const std::vector<FusionInput> two{bell_cluster(3), bell_cluster(3), AncillaInput::basis(3, 2)};
  const auto a = fuse_physical(zero, u, 0);
  const auto b = fuse_physical(two, u, 0);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += std::abs(a[i].probability - b[i].probability);
  CHECK(diff > 1e-3);
}

TEST_CASE("probabilities sum to one") {
  std::mt19937_64 rng(91);
  HaarSampler sampler(92);
  for (int d = 2; d <= 4; ++d) {
    for (int anc = 0; anc <= 2; ++anc) {
      if (d == 4 && anc == 2) continue;  // K = 16, M = 4 runs in the sweep tests
      std::vector<FusionInput> inputs{random_cluster(rng, d, d), bell_cluster(d)};
      for (int a = 0; a < anc; ++a) inputs.emplace_back(AncillaInput(random_state(rng, d)));
      const int k = (2 + anc) * d;
      double total = 0.0;
      for (const auto& o : fuse_physical(inputs, haar_sample(sampler, k), 0)) total += o.probability;
      CAPTURE(d);
      CAPTURE(anc);
      CHECK(std::abs(total - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("two-photon and general amplitude paths agree") {
  std::mt19937_64 rng(17);
  HaarSampler sampler(18);
  const std::vector<FusionInput> inputs{random_cluster(rng, 3, 3), random_cluster(rng, 2, 3)};
  const Interferometer u = haar_sample(sampler, 6);
  const auto two = fuse(inputs, u, 1, {AmplitudePath::TwoPhoton, 1});
  const auto gen = fuse(inputs, u, 1, {AmplitudePath::General, 1});
  const auto par = fuse(inputs, u, 1, {AmplitudePath::General, 3});
  REQUIRE(two.size() == gen.size());
  for (std::size_t i = 0; i < two.size(); ++i) {
    CHECK(two[i].pattern == gen[i].pattern);
    CHECK(std::abs(two[i].probability - gen[i].probability) < 1e-12);
    CHECK(std::abs(par[i].probability - gen[i].probability) == 0.0);
    if (two[i].heralded_state) {
      const CVector diff = two[i].heralded_state->amplitudes() - gen[i].heralded_state->amplitudes();
      CHECK(diff.cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  const std::vector<FusionInput> three{bell_cluster(2), bell_cluster(2), AncillaInput::basis(2)};
  CHECK_THROWS_AS(fuse(three, Interferometer::identity(5), 0, {AmplitudePath::TwoPhoton, 1}), InvalidInput);
}

TEST_CASE("collision heralds factor into two single-side states") {
  SUBCASE("identity: the second factor is null") {
    const auto sources = schmidt_sources(two_bells(2));
    const auto f = product_form_collision(Interferometer::identity(4), sources, 0);
    REQUIRE(f.first.has_value());
    CHECK_FALSE(f.second.has_value());
    CHECK(std::abs(std::abs((*f.first)(0)) - 1.0) < 1e-15);
    CHECK(f.probability == 0.0);
  }
  SUBCASE("fusion matrix: product equals the fused herald") {
    const auto sources = schmidt_sources(two_bells(2));
    const Interferometer u(qubit_type2_unitary());
    const auto f = product_form_collision(u, sources, 0);
    const auto o = fuse_outcome(sources, u, 0, DetectionPattern({0, 0}));
    REQUIRE(o.heralded_state.has_value());
    const CVector prod = qf_test::kron(*f.first, *f.second);
    CHECK(qf_test::overlap(prod, o.heralded_state->amplitudes()) > 1.0 - 1e-12);
    CHECK(std::abs(f.probability - o.probability) < 1e-14);
  }
  SUBCASE("random unitaries: every collision herald has Schmidt rank one") {
    HaarSampler sampler(61);
    const auto sources = schmidt_sources(two_bells(2));
    for (int t = 0; t < 20; ++t) {
      const Interferometer u = haar_sample(sampler, 4);
      for (int k = 0; k < 4; ++k) {
        const auto o = fuse_outcome(sources, u, 0, DetectionPattern({k, k}));
        const std::string left[] = {"V1"};
        CHECK(schmidt_decompose(*o.heralded_state, left).rank() == 1);
      }
    }
  }
  SUBCASE("both factors null is an error") {
    const auto sources = schmidt_sources(two_bells(2));
    CHECK_THROWS_AS(product_form_collision(Interferometer::identity(5), sources, 4), InvalidInput);
  }
}

TEST_CASE("fuse rejects inconsistent shapes") {
  const auto inputs = two_bells(2);
  CHECK_THROWS_AS(fuse(inputs, Interferometer::identity(5), 0), InvalidInput);
  CHECK_THROWS_AS(fuse_physical(inputs, Interferometer::identity(4), 1), InvalidInput);
  CHECK_THROWS_AS(AncillaInput(CVector::Ones(2)), InvalidInput);
  CHECK_THROWS_AS(ClusterInput(bell_cluster(2).state(), "zz"), InvalidInput);
}

TEST_CASE("ancilla basis vectors") {
  const auto a = AncillaInput::basis(4, 2);
  CHECK(std::abs(a.leg_state()(2) - 1.0) == 0.0);
  CHECK((a.leg_basis().col(0) - a.leg_state()).norm() < 1e-15);
  CHECK((a.leg_basis().adjoint() * a.leg_basis() - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
}
