#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "quditfuse/optimize.hpp"
#include "test_support.hpp"

using namespace quditfuse;
using qf_test::bell_cluster;

namespace {

Scenario bells(int d, int ancillae = 0) {
  Scenario s;
  s.inputs = {bell_cluster(d), bell_cluster(d)};
  for (int a = 0; a < ancillae; ++a) s.inputs.emplace_back(AncillaInput::basis(d));
  return s;
}

Objective threshold(double t) {
  Objective o;
  o.mode = ObjectiveMode::EntropyThreshold;
  o.entropy_threshold = t;
  return o;
}

}  // namespace

TEST_CASE("generator parameterization") {
  CHECK((UnitaryParams(3).unitary() - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 30.0);
  for (int k : {1, 2, 4, 6}) {
    std::vector<double> v(static_cast<std::size_t>(k * k));
    for (auto& x : v) x = g(rng);
    const UnitaryParams p(k, v);
    const CMatrix h = p.generator();
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(unitarity_defect(p.unitary()) < 1e-10);
  }
  CHECK_THROWS_AS(UnitaryParams(2, std::vector<double>(3)), InvalidInput);
  CHECK_THROWS_AS(UnitaryParams(1, std::vector<double>{std::nan("")}), InvalidInput);
}

TEST_CASE("objective names and validation") {
  for (auto m : {ObjectiveMode::FullEntanglement, ObjectiveMode::EntropyThreshold, ObjectiveMode::MinEntropyAtSuccess}) {
    CHECK(parse_objective_mode(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_objective_mode("fastest"), InvalidInput);
  CHECK_THROWS_AS(threshold(-0.1).validate(3), InvalidInput);
  CHECK_THROWS_AS(threshold(std::log(2.0) + 0.01).validate(2), InvalidInput);
  CHECK_NOTHROW(threshold(std::log(3.0)).validate(3));
  Objective r;
  r.residual_threshold = -1.0;
  CHECK_THROWS_AS(r.validate(2), InvalidInput);
}

TEST_CASE("success probability") {
  const Objective full;
  CHECK(std::abs(success_probability(Interferometer(qubit_type2_unitary()), bells(2), full) - 0.5) < 1e-12);
  CHECK(success_probability(Interferometer::identity(4), bells(2), full) == 0.0);
  CHECK(success_probability(Interferometer::identity(6), bells(3), full) == 0.0);

  HaarSampler sampler(3);
  const Interferometer u = haar_sample(sampler, 6);
  const auto ev = evaluate(u, bells(3), threshold(0.0));
  double relevant = 0.0;
  for (const auto& o : ev.outcomes) {
    if (o.pattern.collision_free()) relevant += o.probability;
  }
  CHECK(std::abs(ev.value - relevant) < 1e-15);
  CHECK(std::abs(ev.relevant_probability - relevant) < 1e-15);

  Objective spread;
  spread.mode = ObjectiveMode::MinEntropyAtSuccess;
  spread.success_target = 0.5;
  const auto pbs = evaluate(Interferometer(qubit_type2_unitary()), bells(2), spread);
  CHECK(std::abs(pbs.value - std::log(2.0)) < 1e-9);
  spread.success_target = 0.9;
  CHECK(evaluate(Interferometer(qubit_type2_unitary()), bells(2), spread).value == 0.0);
}

TEST_CASE("relabeling detectors and rephasing columns leaves success unchanged") {
  HaarSampler sampler(8);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  const auto scen = bells(3);
  for (int t = 0; t < 5; ++t) {
    const CMatrix u = sampler.next_matrix(6);
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    CMatrix moved(6, 6);
    for (int c = 0; c < 6; ++c) moved.col(perm[static_cast<std::size_t>(c)]) = u.col(c) * std::polar(1.0, angle(rng));
    for (double th : {0.0, 0.3, 0.6}) {
      const double a = success_probability(Interferometer(u), scen, threshold(th));
      const double b = success_probability(Interferometer(moved), scen, threshold(th));
      CHECK(std::abs(a - b) < 1e-12);
    }
  }
}

TEST_CASE("optimizer finds the qubit optimum") {
  OptimizerConfig cfg;
  cfg.budget = 20000;
  cfg.seed = 7;
  const auto r = optimize(bells(2), Objective{}, cfg);
  CHECK(r.best_value >= 0.49);
  CHECK(r.evaluations == 20000);
  CHECK(r.trace.size() == 20000);
  CHECK(r.restart_values.size() == 8);
  CHECK(std::abs(success_probability(Interferometer(r.best_unitary), bells(2), Objective{}) - r.best_value) < 1e-12);
}

TEST_CASE("starting at the fusion matrix keeps the optimum") {
  OptimizerConfig cfg;
  cfg.budget = 400;
  cfg.restarts = 2;
  cfg.start_unitary = qubit_type2_unitary();
  const auto r = optimize(bells(2), Objective{}, cfg);
  CHECK(r.best_value >= 0.5 - 1e-9);
  CHECK(r.best_restart == 0);
  CHECK(r.trace.front().value >= 0.5 - 1e-9);
  cfg.start_unitary = CMatrix::Identity(3, 3);
  CHECK_THROWS_AS(optimize(bells(2), Objective{}, cfg), InvalidInput);
}

TEST_CASE("qutrits cannot be fused into a maximally entangled pair") {
  OptimizerConfig cfg;
  cfg.budget = 4000;
  cfg.restarts = 4;
  const auto r = optimize(bells(3), Objective{}, cfg);
  CHECK(r.best_value < 1e-6);
}

TEST_CASE("qutrits reach entropy just below ln 2") {
  OptimizerConfig cfg;
  cfg.budget = 6000;
  cfg.restarts = 4;
  const double t = std::log(2.0) - 1e-3;
  const auto r = optimize(bells(3), threshold(t), cfg);
  REQUIRE(r.best_value > 0.0);
  const auto ev = evaluate(Interferometer(r.best_unitary), bells(3), threshold(t));
  CHECK(ev.value == r.best_value);
  bool witness = false;
  for (const auto& o : ev.outcomes) witness = witness || (o.relevant && o.heralded && o.entropy >= t - 1e-9);
  CHECK(witness);
}

TEST_CASE("determinism and merge order") {
  OptimizerConfig cfg;
  cfg.budget = 1500;
  cfg.restarts = 3;
  cfg.seed = 99;
  cfg.threads = 1;
  const auto a = optimize(bells(3), threshold(0.4), cfg);
  cfg.threads = 3;
  const auto b = optimize(bells(3), threshold(0.4), cfg);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].evaluation == static_cast<std::int64_t>(i));
    CHECK(a.trace[i].value == b.trace[i].value);
  }
  CHECK(a.best_value == b.best_value);
  CHECK(a.best_restart == b.best_restart);
  CHECK((a.best_unitary - b.best_unitary).cwiseAbs().maxCoeff() == 0.0);
  const double best = *std::max_element(a.restart_values.begin(), a.restart_values.end());
  CHECK(a.best_value == best);
  CHECK(a.restart_values[static_cast<std::size_t>(a.best_restart)] == best);
  for (int r = 0; r < a.best_restart; ++r) CHECK(a.restart_values[static_cast<std::size_t>(r)] < best);
}

TEST_CASE("ancilla states can be searched") {
  OptimizerConfig cfg;
  cfg.budget = 300;
  cfg.restarts = 1;
  cfg.search_ancilla_states = true;
  const auto r = optimize(bells(2, 1), threshold(0.3), cfg);
  REQUIRE(r.best_ancilla_states.size() == 1);
  CHECK(std::abs(r.best_ancilla_states[0].norm() - 1.0) < 1e-12);
  CHECK(r.best_unitary.rows() == 6);
}

TEST_CASE("budget edge cases") {
  OptimizerConfig cfg;
  cfg.budget = 3;
  cfg.restarts = 8;
  const auto r = optimize(bells(2), Objective{}, cfg);
  CHECK(r.evaluations == 3);
  CHECK(r.restart_values.size() == 3);
  cfg.budget = 0;
  CHECK_THROWS_AS(optimize(bells(2), Objective{}, cfg), InvalidInput);
}

TEST_CASE("trade-off curve") {
  OptimizerConfig cfg;
  cfg.budget = 2000;
  cfg.restarts = 2;
  const double ts[] = {0.0, 0.3, std::log(3.0)};
  const auto curve = tradeoff_curve(bells(3), ts, cfg);
  REQUIRE(curve.rows.size() == 3);
  CHECK(curve.rows[0].best_value > 0.5);
  CHECK(curve.rows[2].best_value == 0.0);
  CHECK(curve.rows[0].best_value >= curve.rows[1].best_value);
  const double bad[] = {0.5, 0.1};
  CHECK_THROWS_AS(tradeoff_curve(bells(3), bad, cfg), InvalidInput);

  const double ln2[] = {std::log(2.0)};
  cfg.budget = 4000;
  const auto q = tradeoff_curve(bells(2), ln2, cfg);
  CHECK(q.rows[0].best_value == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("rank bound failures surface as a numeric error") {
  const TheoremViolation v("rank 3 above 2", "0-1");
  const NumericError& base = v;
  CHECK(std::string(base.what()) == "rank 3 above 2");
  CHECK(v.pattern() == "0-1");
}
