#include "quditfuse/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "quditfuse/parallel.hpp"

namespace quditfuse {

UnitaryParams::UnitaryParams(int modes) : UnitaryParams(modes, std::vector<double>()) {}

UnitaryParams::UnitaryParams(int modes, std::vector<double> values) : modes_(modes), values_(std::move(values)) {
  if (modes < 1) throw InvalidInput("UnitaryParams needs at least one mode");
  const auto n = static_cast<std::size_t>(modes) * static_cast<std::size_t>(modes);
  if (values_.empty()) values_.assign(n, 0.0);
  if (values_.size() != n) throw InvalidInput("UnitaryParams expects K^2 values");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidInput("UnitaryParams values must be finite");
  }
}

CMatrix UnitaryParams::generator() const {
  const int k = modes_;
  CMatrix h = CMatrix::Zero(k, k);
  std::size_t p = 0;
  for (int i = 0; i < k; ++i) h(i, i) = values_[p++];
  for (int r = 0; r < k; ++r) {
    for (int c = r + 1; c < k; ++c) {
      const Complex z(values_[p], values_[p + 1]);
      p += 2;
      h(r, c) = z;
      h(c, r) = std::conj(z);
    }
  }
  return h;
}

CMatrix UnitaryParams::unitary() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(generator());
  const RVector& w = eig.eigenvalues();
  CVector phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::polar(1.0, w(i));
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

std::string to_string(ObjectiveMode mode) {
  switch (mode) {
    case ObjectiveMode::FullEntanglement: return "max-success-at-full-entanglement";
    case ObjectiveMode::EntropyThreshold: return "max-success-above-entropy-threshold";
    case ObjectiveMode::MinEntropyAtSuccess: return "max-min-entropy-at-fixed-success";
  }
  return "unknown";
}

ObjectiveMode parse_objective_mode(const std::string& name) {
  for (auto m : {ObjectiveMode::FullEntanglement, ObjectiveMode::EntropyThreshold, ObjectiveMode::MinEntropyAtSuccess}) {
    if (to_string(m) == name) return m;
  }
  throw InvalidInput("unknown objective mode '" + name + "'");
}

void Objective::validate(int d) const {
  if (!(entropy_threshold >= 0.0) || !(residual_threshold >= 0.0) || !(entropy_tolerance >= 0.0)) {
    throw InvalidInput("objective thresholds must be non-negative");
  }
  if (entropy_threshold > std::log(static_cast<double>(d)) + entropy_tolerance) {
    throw InvalidInput("entropy threshold exceeds ln d");
  }
  if (mode == ObjectiveMode::MinEntropyAtSuccess && !(success_target > 0.0 && success_target <= 1.0)) {
    throw InvalidInput("success target must lie in (0, 1]");
  }
}

int Scenario::physical_modes() const {
  int k = vacuum_pads;
  for (const auto& in : inputs) k += std::visit([](const auto& x) { return x.leg_dim(); }, in);
  return k;
}

int Scenario::dim() const {
  if (inputs.empty()) throw InvalidInput("scenario has no inputs");
  return std::visit([](const auto& x) { return x.leg_dim(); }, inputs.front());
}

namespace {

bool meets(const OutcomeSummary& o, const Objective& obj, double entropy_floor) {
  if (!o.relevant || !o.heralded) return false;
  switch (obj.mode) {
    case ObjectiveMode::FullEntanglement: return o.residual < obj.residual_threshold;
    case ObjectiveMode::EntropyThreshold: return o.entropy >= obj.entropy_threshold - obj.entropy_tolerance;
    case ObjectiveMode::MinEntropyAtSuccess: return o.entropy >= entropy_floor - obj.entropy_tolerance;
  }
  return false;
}

// Largest t with P(relevant, S >= t) >= target; nullopt if even t = 0 fails.
std::optional<double> min_entropy_at_success(const std::vector<OutcomeSummary>& outcomes, double target) {
  std::vector<const OutcomeSummary*> rel;
  for (const auto& o : outcomes) {
    if (o.relevant && o.heralded) rel.push_back(&o);
  }
  std::stable_sort(rel.begin(), rel.end(), [](auto* a, auto* b) { return a->entropy > b->entropy; });
  double acc = 0.0;
  for (auto* o : rel) {
    acc += o->probability;
    if (acc >= target - 1e-12) return o->entropy;
  }
  return std::nullopt;
}

}  // namespace

ScenarioEvaluation evaluate(const Interferometer& physical, const Scenario& scenario, const Objective& objective) {
  const auto outcomes = fuse_physical(std::span<const FusionInput>(scenario.inputs), physical, scenario.vacuum_pads);
  const auto sources = schmidt_sources(std::span<const FusionInput>(scenario.inputs));
  const int photons = scenario.photons();

  ScenarioEvaluation ev;
  ev.outcomes.reserve(outcomes.size());
  for (const auto& out : outcomes) {
    OutcomeSummary s;
    s.pattern = out.pattern;
    s.probability = out.probability;
    s.relevant = out.relevant;
    s.heralded = out.heralded_state.has_value();
    if (s.heralded) {
      bool first = true;
      for (const auto& src : sources) {
        if (src.ancilla) continue;
        const ReducedDensity rho = reduced_density(*out.heralded_state, src.label);
        s.rank = std::max(s.rank, numerical_rank(rho));
        s.residual = std::max(s.residual, scalar_condition_residual(rho, rho.dim()));
        if (first) s.entropy = entropy(rho);
        first = false;
      }
      if (s.rank > photons) {
        throw TheoremViolation("herald " + out.pattern.to_string() + " has Schmidt rank " + std::to_string(s.rank) +
                                   " above the photon count " + std::to_string(photons),
                               out.pattern.to_string());
      }
    }
    if (s.relevant) ev.relevant_probability += s.probability;
    ev.outcomes.push_back(std::move(s));
  }

  double floor = 0.0;
  if (objective.mode == ObjectiveMode::MinEntropyAtSuccess) {
    const auto t = min_entropy_at_success(ev.outcomes, objective.success_target);
    // Unreachable targets score 0 and count no successes.
    floor = t.value_or(std::numeric_limits<double>::infinity());
    ev.value = t.value_or(0.0);
  }
  for (auto& s : ev.outcomes) {
    s.meets_objective = meets(s, objective, floor);
    if (s.meets_objective) ev.success_probability += s.probability;
  }
  if (objective.mode != ObjectiveMode::MinEntropyAtSuccess) ev.value = ev.success_probability;
  return ev;
}

double success_probability(const Interferometer& physical, const Scenario& scenario, const Objective& objective) {
  return evaluate(physical, scenario, objective).success_probability;
}

namespace {

// Smoothed stand-in for the indicator objectives; the width follows the
// search step so it sharpens to the exact value as the search converges.
double surrogate(const ScenarioEvaluation& ev, const Objective& obj, double step) {
  switch (obj.mode) {
    case ObjectiveMode::FullEntanglement: {
      const double tau = std::max(step, 0.1 * obj.residual_threshold);
      double s = 0.0;
      for (const auto& o : ev.outcomes) {
        if (!o.relevant || !o.heralded) continue;
        const double x = o.residual / tau;
        s += o.probability / (1.0 + x * x);
      }
      return s;
    }
    case ObjectiveMode::EntropyThreshold: {
      if (obj.entropy_threshold <= obj.entropy_tolerance) return ev.relevant_probability;
      const double tau = std::max(0.1 * step, 1e-12);
      double s = 0.0;
      for (const auto& o : ev.outcomes) {
        if (!o.relevant || !o.heralded) continue;
        const double x = (o.entropy - obj.entropy_threshold + obj.entropy_tolerance) / tau;
        s += o.probability / (1.0 + std::exp(-std::clamp(x, -700.0, 700.0)));
      }
      return s;
    }
    case ObjectiveMode::MinEntropyAtSuccess: {
      if (ev.success_probability > 0.0) return ev.value;
      return ev.relevant_probability - obj.success_target;
    }
  }
  return ev.value;
}

struct Candidate {
  CMatrix base;
  std::vector<double> x;  // generator coordinates, then ancilla (re, im) pairs
};

struct RestartResult {
  std::vector<double> trace;
  double best_value = -std::numeric_limits<double>::infinity();
  double best_success = 0.0;
  CMatrix best_unitary;
  std::vector<CVector> best_ancillas;
};

class Search {
 public:
  Search(const Scenario& scenario, const Objective& objective, const OptimizerConfig& config)
      : scenario_(scenario), objective_(objective), config_(config), k_(scenario.physical_modes()) {
    for (std::size_t i = 0; i < scenario.inputs.size(); ++i) {
      if (std::holds_alternative<AncillaInput>(scenario.inputs[i])) ancilla_slots_.push_back(i);
    }
  }

  std::size_t param_count() const {
    std::size_t n = static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_);
    if (config_.search_ancilla_states) {
      for (auto i : ancilla_slots_) n += 2 * static_cast<std::size_t>(ancilla_dim(i));
    }
    return n;
  }

  RestartResult run(int restart, std::int64_t budget) const {
    RestartResult res;
    HaarSampler sampler(config_.seed + static_cast<std::uint64_t>(restart));
    bool use_start = restart == 0 && config_.start_unitary.has_value();
    while (static_cast<std::int64_t>(res.trace.size()) < budget) {
      Candidate c;
      if (use_start) {
        c.base = *config_.start_unitary;
        use_start = false;
      } else {
        c.base = sampler.next_matrix(k_);
      }
      c.x.assign(param_count(), 0.0);
      seed_ancillas(c.x);
      descend(c, sampler.engine(), budget, res);
    }
    return res;
  }

 private:
  int ancilla_dim(std::size_t slot) const { return std::get<AncillaInput>(scenario_.inputs[slot]).leg_dim(); }

  void seed_ancillas(std::vector<double>& x) const {
    if (!config_.search_ancilla_states) return;
    std::size_t p = static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_);
    for (auto i : ancilla_slots_) {
      const CVector& psi = std::get<AncillaInput>(scenario_.inputs[i]).leg_state();
      for (Eigen::Index j = 0; j < psi.size(); ++j) {
        x[p++] = psi(j).real();
        x[p++] = psi(j).imag();
      }
    }
  }

  CMatrix unitary_of(const Candidate& c, const std::vector<double>& x) const {
    const std::size_t n = static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_);
    const UnitaryParams params(k_, std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)));
    return c.base * params.unitary();
  }

  // Ancilla states encoded in x, or nullopt if one of them has zero norm.
  std::optional<Scenario> scenario_of(const std::vector<double>& x) const {
    if (!config_.search_ancilla_states || ancilla_slots_.empty()) return scenario_;
    Scenario s = scenario_;
    std::size_t p = static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_);
    for (auto i : ancilla_slots_) {
      const int d = ancilla_dim(i);
      CVector psi(d);
      for (int j = 0; j < d; ++j, p += 2) psi(j) = Complex(x[p], x[p + 1]);
      const double n = psi.norm();
      if (!(n > 1e-8)) return std::nullopt;
      s.inputs[i] = AncillaInput(psi / n);
    }
    return s;
  }

  // Returns the surrogate and records the exact value in the trace.
  double score(const Candidate& c, const std::vector<double>& x, double step, RestartResult& res) const {
    const auto scen = scenario_of(x);
    if (!scen) {
      res.trace.push_back(res.trace.empty() ? 0.0 : res.trace.back());
      return -std::numeric_limits<double>::infinity();
    }
    const CMatrix u = unitary_of(c, x);
    const ScenarioEvaluation ev = evaluate(Interferometer(u), *scen, objective_);
    res.trace.push_back(ev.value);
    if (ev.value > res.best_value) {
      res.best_value = ev.value;
      res.best_success = ev.success_probability;
      res.best_unitary = u;
      res.best_ancillas.clear();
      for (auto i : ancilla_slots_) res.best_ancillas.push_back(std::get<AncillaInput>(scen->inputs[i]).leg_state());
    }
    return surrogate(ev, objective_, step);
  }

  // Polls +-step along the columns of a random orthonormal basis, redrawn
  // after every failed poll. Fixed coordinate directions stall on the
  // cone-shaped residual landscape near fully entangled heralds.
  void descend(Candidate& c, std::mt19937_64& rng, std::int64_t budget, RestartResult& res) const {
    auto left = [&] { return budget - static_cast<std::int64_t>(res.trace.size()); };
    const std::size_t n_unitary = static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_);
    const auto n = static_cast<Eigen::Index>(c.x.size());
    double step = config_.initial_step;
    double f = score(c, c.x, step, res);
    Eigen::MatrixXd dirs = random_basis(rng, n);
    while (left() > 0 && step >= config_.min_step) {
      bool improved = false;
      for (Eigen::Index p = 0; p < n && left() > 0; ++p) {
        for (double sign : {1.0, -1.0}) {
          if (left() <= 0) break;
          std::vector<double> y = c.x;
          for (Eigen::Index q = 0; q < n; ++q) y[static_cast<std::size_t>(q)] += sign * step * dirs(q, p);
          const double g = score(c, y, step, res);
          if (g > f) {
            c.x = std::move(y);
            f = g;
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        step *= 0.5;
        // Fold the generator into the base so coordinates stay local.
        c.base = unitary_of(c, c.x);
        std::fill(c.x.begin(), c.x.begin() + static_cast<std::ptrdiff_t>(n_unitary), 0.0);
        dirs = random_basis(rng, n);
        if (left() > 0 && step >= config_.min_step) f = score(c, c.x, step, res);
      }
    }
  }

  static Eigen::MatrixXd random_basis(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) g(i, j) = gauss(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  }

  const Scenario& scenario_;
  const Objective& objective_;
  const OptimizerConfig& config_;
  int k_;
  std::vector<std::size_t> ancilla_slots_;
};

}  // namespace

OptimizeResult optimize(const Scenario& scenario, const Objective& objective, const OptimizerConfig& config) {
  if (config.budget < 1) throw InvalidInput("optimizer budget must be at least one evaluation");
  if (config.restarts < 1) throw InvalidInput("optimizer needs at least one restart");
  if (!(config.initial_step > 0.0) || !(config.min_step > 0.0)) throw InvalidInput("optimizer steps must be positive");
  objective.validate(scenario.dim());
  const int k = scenario.physical_modes();
  if (config.start_unitary) {
    // Validates shape and unitarity.
    const Interferometer check(*config.start_unitary);
    if (check.modes() != k) throw InvalidInput("start unitary does not match the scenario's mode count");
  }

  const int restarts = static_cast<int>(std::min<std::int64_t>(config.restarts, config.budget));
  std::vector<std::int64_t> budgets(static_cast<std::size_t>(restarts), config.budget / restarts);
  for (std::int64_t r = 0; r < config.budget % restarts; ++r) ++budgets[static_cast<std::size_t>(r)];

  const Search search(scenario, objective, config);
  std::vector<RestartResult> results(static_cast<std::size_t>(restarts));
  const int threads = config.threads > 0 ? config.threads : default_thread_count();
  parallel_for(results.size(), threads, [&](std::size_t r) { results[r] = search.run(static_cast<int>(r), budgets[r]); });

  OptimizeResult out;
  out.best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < results.size(); ++r) {
    auto& res = results[r];
    for (double v : res.trace) out.trace.push_back({out.evaluations++, v});
    out.restart_values.push_back(res.best_value);
    if (res.best_value > out.best_value) {
      out.best_value = res.best_value;
      out.best_success_probability = res.best_success;
      out.best_unitary = res.best_unitary;
      out.best_ancilla_states = res.best_ancillas;
      out.best_restart = static_cast<int>(r);
    }
  }
  if (out.best_ancilla_states.empty()) {
    for (const auto& in : scenario.inputs) {
      if (const auto* a = std::get_if<AncillaInput>(&in)) out.best_ancilla_states.push_back(a->leg_state());
    }
  }
  return out;
}

TradeoffCurve tradeoff_curve(const Scenario& scenario, std::span<const double> thresholds,
                             const OptimizerConfig& config) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) throw InvalidInput("tradeoff thresholds must be ascending");
  TradeoffCurve curve;
  for (double t : thresholds) {
    Objective obj;
    obj.mode = ObjectiveMode::EntropyThreshold;
    obj.entropy_threshold = t;
    const auto res = optimize(scenario, obj, config);
    if (!curve.rows.empty() && res.best_value > curve.rows.back().best_value + 1e-6) curve.monotone = false;
    curve.rows.push_back({t, res.best_value});
  }
  return curve;
}

}  // namespace quditfuse
