#include "quditfuse/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quditfuse/graphstate.hpp"
#include "quditfuse/haar.hpp"
#include "quditfuse/parallel.hpp"

namespace quditfuse {

namespace {

struct TrialResult {
  std::vector<SweepRow> rows;
  std::vector<SweepViolation> violations;
  double product_probability = 0.0;
  double probability_defect = 0.0;
  int certificates = 0;
  int modes = 0;
};

RVector graph_state_coefficients(int d) {
  const QuditGraph pair(QuditDim(d), {"r", "leg"}, {{"r", "leg"}});
  const ClusterInput cluster(build_graph_state(pair), "leg");
  return cluster.schmidt().coefficients;
}

RVector random_coefficients(std::mt19937_64& rng, int d) {
  const CVector psi = random_state(rng, d * d);
  const PureState state = PureState::normalized({{"r", d}, {"leg", d}}, psi);
  const std::string left[] = {"r"};
  return schmidt_decompose(state, left).coefficients;
}

// Nonzero spectra of the two sides of a bipartite pure state must agree.
double spectrum_mismatch(const RVector& a, const RVector& b) {
  RVector x = a.reverse();
  RVector y = b.reverse();
  const Eigen::Index n = std::max(x.size(), y.size());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = i < x.size() ? x(i) : 0.0;
    const double v = i < y.size() ? y(i) : 0.0;
    worst = std::max(worst, std::abs(u - v));
  }
  return worst;
}

TrialResult run_trial(const SweepConfig& cfg, int trial, const RVector& graph_coeffs) {
  TrialResult out;
  const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(trial);
  std::mt19937_64 rng(seed);

  std::vector<SchmidtSource> sources;
  for (int c = 0; c < 2; ++c) {
    RVector coeffs = cfg.inputs == SweepInputs::GraphState ? graph_coeffs : random_coefficients(rng, cfg.d);
    sources.push_back({"V" + std::to_string(c + 1), std::move(coeffs), false});
  }
  for (int a = 0; a < cfg.ancillae; ++a) {
    sources.push_back({"V" + std::to_string(a + 3), RVector::Ones(1), true});
  }
  int modes = cfg.vacuum_pads;
  for (const auto& s : sources) modes += static_cast<int>(s.coefficients.size());
  const int photons = static_cast<int>(sources.size());
  const int k1 = static_cast<int>(sources[0].coefficients.size());
  const int k2 = static_cast<int>(sources[1].coefficients.size());

  out.modes = modes;
  const Interferometer u(haar_unitary(rng, modes));
  const auto outcomes = fuse(std::span<const SchmidtSource>(sources), u, cfg.vacuum_pads);

  auto flag = [&](std::string check, const DetectionPattern& p, std::string detail) {
    out.violations.push_back({std::move(check), trial, seed, p.to_string(), std::move(detail)});
  };

  double total = 0.0;
  double collision_probability = 0.0;
  bool entangled_relevant = false;
  std::vector<double> double_click(static_cast<std::size_t>(modes), 0.0);

  for (const auto& o : outcomes) {
    total += o.probability;
    SweepRow row;
    row.trial = trial;
    row.trial_seed = seed;
    row.pattern = o.pattern;
    row.probability = o.probability;
    row.relevant = o.relevant;
    row.heralded = o.heralded_state.has_value();
    if (!o.relevant) collision_probability += o.probability;
    if (photons == 2 && !o.relevant) double_click[static_cast<std::size_t>(o.pattern.modes()[0])] = o.probability;

    if (o.heralded_state) {
      const std::string first[] = {"V1"};
      const CMatrix c = o.heralded_state->as_matrix(first);
      CMatrix rho_m = c * c.adjoint();
      rho_m = 0.5 * (rho_m + rho_m.adjoint()).eval();
      if (cfg.rho_hook) cfg.rho_hook(rho_m);
      const ReducedDensity rho1("V1", std::move(rho_m));
      const ReducedDensity rho2 = reduced_density(*o.heralded_state, "V2");

      row.rank = numerical_rank(rho1);
      row.entropy = entropy(rho1);
      row.residual = scalar_condition_residual(rho1, k1);
      row.residual_other = scalar_condition_residual(rho2, k2);
      const int rank2 = numerical_rank(rho2);

      if (row.rank > photons || rank2 > photons) {
        flag("rank", o.pattern,
             "rank " + std::to_string(std::max(row.rank, rank2)) + " exceeds M = " + std::to_string(photons));
      }
      // Eigenvalues below the rank cutoff still carry up to ~1e-9 nats each.
      double tail = 0.0;
      const RVector& ev1 = rho1.spectrum();
      for (double lambda : ev1) {
        if (lambda > 1e-14 && lambda <= kRankTolerance * ev1(ev1.size() - 1)) tail -= lambda * std::log(lambda);
      }
      if (row.entropy > std::log(static_cast<double>(std::max(row.rank, 1))) + tail + 1e-9) {
        flag("entropy-bound", o.pattern, "entropy exceeds ln(rank)");
      }
      if (photons == 2 || cfg.ancillae == 0) {
        const double mismatch = spectrum_mismatch(rho1.spectrum(), rho2.spectrum());
        if (mismatch > 1e-10) flag("spectra", o.pattern, "V1/V2 spectra differ by " + std::to_string(mismatch));
      }
      if (k1 > photons) {
        const auto cert = rank_certificate(u, sources, 0, o.pattern, rho1);
        ++out.certificates;
        row.kernel_residual = cert.max_kernel_residual;
        if (!cert.holds()) {
          flag("kernel-certificate", o.pattern,
               std::to_string(cert.kernel_vectors.size()) + " kernel vectors, max ||rho z|| = " +
                   std::to_string(cert.max_kernel_residual));
        }
        if (row.residual < kMaxEntangledResidual) flag("max-entangled", o.pattern, "V1 herald is maximally entangled");
      }
      if (k2 > photons && row.residual_other < kMaxEntangledResidual) {
        flag("max-entangled", o.pattern, "V2 herald is maximally entangled");
      }
      if (o.relevant && row.rank > 1) entangled_relevant = true;
      if (row.rank == 1) out.product_probability += o.probability;
    }
    out.rows.push_back(std::move(row));
  }

  out.probability_defect = std::abs(total - 1.0);
  if (out.probability_defect > 1e-10) {
    flag("probability-sum", DetectionPattern{}, "outcome probabilities sum to " + std::to_string(total));
  }

  if (photons == 2) {
    if (collision_probability <= 1e-12 && entangled_relevant) {
      flag("product-outcome", DetectionPattern{}, "no collision probability yet some relevant herald is entangled");
    }
    // p_kk < 1e-12 forces every (k, l) herald to be a product state.
    for (const auto& o : outcomes) {
      if (!o.relevant || !o.heralded_state) continue;
      for (int mode : o.pattern.modes()) {
        if (double_click[static_cast<std::size_t>(mode)] >= 1e-12) continue;
        const ReducedDensity rho = reduced_density(*o.heralded_state, "V1");
        const RVector& ev = rho.spectrum();
        const double second = ev.size() > 1 ? std::sqrt(std::max(0.0, ev(ev.size() - 2))) : 0.0;
        if (second >= 1e-6) {
          flag("silent-double-click", o.pattern, "p_kk ~ 0 but second Schmidt coefficient is " + std::to_string(second));
        }
      }
    }
  }
  return out;
}

}  // namespace

SweepReport theorem_sweep(const SweepConfig& config) {
  if (config.trials < 1) throw InvalidInput("theorem sweep needs at least one trial");
  if (config.ancillae < 0 || config.vacuum_pads < 0) throw InvalidInput("ancilla and pad counts must be >= 0");
  (void)QuditDim(config.d);

  const RVector graph_coeffs = graph_state_coefficients(config.d);
  std::vector<TrialResult> trials(static_cast<std::size_t>(config.trials));
  parallel_for(trials.size(), config.threads,
               [&](std::size_t t) { trials[t] = run_trial(config, static_cast<int>(t), graph_coeffs); });

  SweepReport report;
  report.config = config;
  report.photons = 2 + config.ancillae;
  report.min_residual = std::numeric_limits<double>::infinity();
  for (auto& t : trials) {
    for (auto& row : t.rows) {
      report.max_rank = std::max(report.max_rank, row.rank);
      report.max_entropy = std::max(report.max_entropy, row.entropy);
      if (row.relevant && row.heralded) {
        report.min_residual = std::min({report.min_residual, row.residual, row.residual_other});
      }
      report.rows.push_back(std::move(row));
    }
    report.violations.insert(report.violations.end(), t.violations.begin(), t.violations.end());
    report.min_product_probability = std::min(report.min_product_probability, t.product_probability);
    report.max_probability_defect = std::max(report.max_probability_defect, t.probability_defect);
    report.certificates_checked += t.certificates;
  }
  report.modes = trials.front().modes;
  return report;
}

}  // namespace quditfuse
