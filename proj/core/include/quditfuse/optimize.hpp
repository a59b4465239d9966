#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quditfuse/analysis.hpp"
#include "quditfuse/haar.hpp"

namespace quditfuse {

/// K^2 real coordinates of a Hermitian generator H: the first K entries are
/// the diagonal, then (re, im) of H(r, c) for r < c in row-major order.
/// The represented unitary is exp(iH), unitary to rounding for any finite
/// parameter vector.
class UnitaryParams {
 public:
  explicit UnitaryParams(int modes);
  UnitaryParams(int modes, std::vector<double> values);

  int modes() const noexcept { return modes_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  CMatrix generator() const;
  CMatrix unitary() const;

 private:
  int modes_;
  std::vector<double> values_;
};

enum class ObjectiveMode {
  FullEntanglement,     ///< relevant heralds with scalar residual below threshold
  EntropyThreshold,     ///< relevant heralds with entropy >= threshold
  MinEntropyAtSuccess,  ///< largest t with P(relevant, S >= t) >= success_target
};

std::string to_string(ObjectiveMode mode);
/// Accepts "max-success-at-full-entanglement", "max-success-above-entropy-threshold"
/// and "max-min-entropy-at-fixed-success".
ObjectiveMode parse_objective_mode(const std::string& name);

struct Objective {
  ObjectiveMode mode = ObjectiveMode::FullEntanglement;
  double entropy_threshold = 0.0;  ///< nats
  double residual_threshold = kMaxEntangledResidual;
  double success_target = 0.25;    ///< MinEntropyAtSuccess only
  double entropy_tolerance = 1e-9;

  /// Throws InvalidInput for negative thresholds or entropy_threshold > ln d.
  void validate(int d) const;
};

/// Inputs and pads for the leg-mode interferometer. Physical mode order:
/// each input's d leg modes in input order, then the vacuum pads.
struct Scenario {
  std::vector<FusionInput> inputs;
  int vacuum_pads = 0;

  int physical_modes() const;
  int photons() const noexcept { return static_cast<int>(inputs.size()); }
  /// Leg dimension of the first input.
  int dim() const;
};

struct OutcomeSummary {
  DetectionPattern pattern;
  double probability = 0.0;
  bool relevant = false;
  bool heralded = false;
  int rank = 0;            ///< max over cluster remainders
  double entropy = 0.0;    ///< V1 | rest, nats
  double residual = 0.0;   ///< max over clusters of ||rho_m - I/k_m||_F
  bool meets_objective = false;
};

struct ScenarioEvaluation {
  double value = 0.0;                ///< objective value
  double success_probability = 0.0;  ///< probability of outcomes meeting the criterion
  double relevant_probability = 0.0;
  std::vector<OutcomeSummary> outcomes;
};

/// A numerically checked rank bound failed. Carries the offending pattern.
class TheoremViolation : public NumericError {
 public:
  TheoremViolation(const std::string& what, std::string pattern)
      : NumericError(what), pattern_(std::move(pattern)) {}
  const std::string& pattern() const noexcept { return pattern_; }

 private:
  std::string pattern_;
};

/// Fuses with a leg-mode interferometer and scores every outcome. Throws
/// TheoremViolation if any herald has rank above the photon count.
ScenarioEvaluation evaluate(const Interferometer& physical, const Scenario& scenario, const Objective& objective);

double success_probability(const Interferometer& physical, const Scenario& scenario, const Objective& objective);

struct OptimizerConfig {
  std::int64_t budget = 100000;  ///< objective evaluations, summed over restarts
  int restarts = 8;
  std::uint64_t seed = 1;        ///< restart r samples its start from seed + r
  double initial_step = 0.5;
  double min_step = 1e-9;
  bool search_ancilla_states = false;
  /// When set, restart 0 starts from this unitary instead of a Haar sample.
  std::optional<CMatrix> start_unitary;
  int threads = 0;
};

struct TracePoint {
  std::int64_t evaluation = 0;
  double value = 0.0;  ///< exact objective at this evaluation
};

struct OptimizeResult {
  CMatrix best_unitary;
  std::vector<CVector> best_ancilla_states;
  double best_value = 0.0;
  double best_success_probability = 0.0;
  int best_restart = 0;
  std::int64_t evaluations = 0;
  std::vector<TracePoint> trace;
  std::vector<double> restart_values;
};

/// Multi-restart compass search on UnitaryParams around Haar starting points.
/// A smoothed surrogate whose width follows the step size guides the search;
/// the reported values are always the exact objective. Deterministic for a
/// given (scenario, objective, config); restarts are merged by best value
/// with ties going to the lowest restart index.
OptimizeResult optimize(const Scenario& scenario, const Objective& objective, const OptimizerConfig& config);

struct TradeoffRow {
  double threshold = 0.0;
  double best_value = 0.0;
};

struct TradeoffCurve {
  std::vector<TradeoffRow> rows;
  /// Soft diagnostic: values are non-increasing in threshold within 1e-6.
  /// Raw values are reported either way.
  bool monotone = true;
};

/// One EntropyThreshold optimization per threshold, all with the same
/// restart seeds. Thresholds must be ascending.
TradeoffCurve tradeoff_curve(const Scenario& scenario, std::span<const double> thresholds,
                             const OptimizerConfig& config);

}  // namespace quditfuse
