#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "quditfuse/analysis.hpp"

namespace quditfuse {

enum class SweepInputs {
  GraphState,   ///< two-qudit graph state per cluster: all Schmidt coefficients 1/sqrt(d)
  RandomState,  ///< Haar-random pure state on remainder x leg (d x d) per cluster
};

/// Randomized check of the rank bounds over Haar interferometers.
/// Trial t uses the seed `seed + t`, so results do not depend on scheduling.
struct SweepConfig {
  int d = 3;
  int ancillae = 0;
  int trials = 100;
  std::uint64_t seed = 1;
  int vacuum_pads = 0;
  SweepInputs inputs = SweepInputs::GraphState;
  int threads = 0;
  /// Test hook: may modify each V1 density matrix before it is analysed.
  std::function<void(CMatrix&)> rho_hook;
};

struct SweepRow {
  int trial = 0;
  std::uint64_t trial_seed = 0;
  DetectionPattern pattern;
  double probability = 0.0;
  bool relevant = false;
  bool heralded = false;
  int rank = 0;              ///< numerical rank of rho on V1
  double entropy = 0.0;      ///< nats, V1 | rest
  double residual = 0.0;     ///< ||rho_V1 - I/k1||_F
  double residual_other = 0.0;  ///< ||rho_V2 - I/k2||_F
  double kernel_residual = 0.0;  ///< max ||rho z|| over certificate vectors (V1 side)
};

struct SweepViolation {
  std::string check;
  int trial = 0;
  std::uint64_t trial_seed = 0;
  std::string pattern;
  std::string detail;
};

struct SweepReport {
  SweepConfig config;
  int photons = 0;  ///< M = 2 + ancillae
  int modes = 0;    ///< K
  std::vector<SweepRow> rows;
  std::vector<SweepViolation> violations;
  int max_rank = 0;
  double max_entropy = 0.0;
  double min_residual = 0.0;               ///< over relevant heralds, both sides
  double min_product_probability = 1.0;    ///< per-trial probability of a rank-1 herald
  double max_probability_defect = 0.0;     ///< max |sum p - 1|
  int certificates_checked = 0;

  bool passed() const noexcept { return violations.empty(); }
};

/// Runs `trials` Haar interferometers on two clusters plus `ancillae`
/// single-photon ancillas, and checks on every outcome:
///  - rank of either cluster's reduced density <= M
///  - entropy <= ln(rank) + 1e-9 (plus the entropy of sub-cutoff eigenvalues),
///    equal nonzero spectra on both sides
///  - explicit kernel vectors with ||rho z|| < 1e-9 when k1 > M
///  - no maximally entangled herald when k > M
///  - probabilities sum to 1 within 1e-10
///  - for M = 2: product-state probability > 0, and p_kk < 1e-12 implies
///    every (k, l) herald is product (second Schmidt coefficient < 1e-6)
SweepReport theorem_sweep(const SweepConfig& config);

}  // namespace quditfuse
