#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "quditfuse/fock.hpp"
#include "quditfuse/state.hpp"

namespace quditfuse {

/// Schmidt coefficients below this are treated as zero and dropped.
inline constexpr double kSchmidtCutoff = 1e-12;
/// Outcomes below this probability carry no heralded state.
inline constexpr double kNullOutcomeProbability = 1e-14;

/// psi = sum_i coefficients[i] |left_i> |right_i>, over a bipartition of a
/// PureState. Both bases are stored completed to full unitaries; the first
/// rank() columns are the Schmidt vectors.
struct SchmidtForm {
  std::vector<Subsystem> left;
  std::vector<Subsystem> right;
  RVector coefficients;  ///< descending, strictly positive
  CMatrix left_basis;    ///< dim(left) x dim(left), unitary
  CMatrix right_basis;   ///< dim(right) x dim(right), unitary

  int rank() const noexcept { return static_cast<int>(coefficients.size()); }
  /// Amplitude matrix sum_i c_i left_i right_i^T (rows: left, cols: right).
  CMatrix reconstruct() const;
};

/// Throws InvalidInput if either side of the cut is empty or a label is
/// unknown. Subsystems on each side keep the order given in `left_labels`
/// and the state's declared order, respectively.
SchmidtForm schmidt_decompose(const PureState& state, std::span<const std::string> left_labels,
                              double cutoff = kSchmidtCutoff);

/// A cluster state with one designated leg qudit that enters the
/// interferometer. The Schmidt form splits remainder (left) from leg (right).
class ClusterInput {
 public:
  ClusterInput(PureState state, std::string leg);

  const PureState& state() const noexcept { return state_; }
  const std::string& leg() const noexcept { return leg_; }
  const SchmidtForm& schmidt() const noexcept { return schmidt_; }
  int leg_dim() const noexcept { return schmidt_.right.front().dim; }

 private:
  PureState state_;
  std::string leg_;
  SchmidtForm schmidt_;
};

/// A single photon over its d modes with no remainder (k = 1, vacuum rest).
class AncillaInput {
 public:
  explicit AncillaInput(CVector leg_state);
  /// |j> over d modes.
  static AncillaInput basis(int d, int j = 0);

  const CVector& leg_state() const noexcept { return leg_state_; }
  int leg_dim() const noexcept { return static_cast<int>(leg_state_.size()); }
  /// d x d unitary whose first column is the leg state.
  const CMatrix& leg_basis() const noexcept { return leg_basis_; }

 private:
  CVector leg_state_;
  CMatrix leg_basis_;
};

using FusionInput = std::variant<ClusterInput, AncillaInput>;

/// Schmidt data fed to the amplitude kernel: one entry per photon source.
struct SchmidtSource {
  std::string label;     ///< name of the heralded subsystem, e.g. "V1"
  RVector coefficients;  ///< k_m strictly positive values
  bool ancilla = false;
};

std::vector<SchmidtSource> schmidt_sources(std::span<const FusionInput> inputs);

/// Leg-mode interferometer re-expressed on Schmidt rows.
struct SchmidtFrame {
  Interferometer unitary;
  RowLayout layout;
};

/// `physical` acts on the leg modes of every input, in input order, followed
/// by `vacuum_pads` empty modes. Each input's block of rows is rotated into
/// its Schmidt basis; rows with a photon come first (f(m, i) order), and the
/// unused Schmidt directions join the vacuum pads.
SchmidtFrame to_schmidt_frame(std::span<const FusionInput> inputs, const Interferometer& physical,
                              int vacuum_pads);

struct FusionOutcome {
  DetectionPattern pattern;
  double probability = 0.0;
  /// Heralded state over the sources' remainders, in Schmidt coordinates.
  /// Empty when probability < kNullOutcomeProbability.
  std::optional<PureState> heralded_state;
  /// Norm of sum (prod alpha) * a_{i..,l..} with a the full symmetric sum;
  /// probability == norm_factor^2 / prod_k n_k!.
  double norm_factor = 0.0;
  /// True for collision-free patterns.
  bool relevant = false;
};

enum class AmplitudePath {
  Auto,       ///< closed two-photon formulas when M == 2, general otherwise
  TwoPhoton,  ///< a_{ij,kl} formulas only; requires M == 2
  General,    ///< arrangement sums for any M
};

struct FuseOptions {
  AmplitudePath path = AmplitudePath::Auto;
  /// 0 picks a default; patterns are split across workers.
  int threads = 1;
};

/// Every detection pattern with its heralded state and probability.
/// `u` is indexed in the Schmidt frame: rows are f(m, i) for each source,
/// then vacuum pads, so u.modes() == sum k_m + vacuum_pads.
std::vector<FusionOutcome> fuse(std::span<const SchmidtSource> sources, const Interferometer& u,
                                int vacuum_pads, const FuseOptions& options = {});

/// Single pattern of the above.
FusionOutcome fuse_outcome(std::span<const SchmidtSource> sources, const Interferometer& u, int vacuum_pads,
                           const DetectionPattern& pattern, AmplitudePath path = AmplitudePath::Auto);

std::vector<FusionOutcome> fuse(std::span<const FusionInput> inputs, const Interferometer& u,
                                int vacuum_pads, const FuseOptions& options = {});

/// Same, with the interferometer given on physical leg modes.
std::vector<FusionOutcome> fuse_physical(std::span<const FusionInput> inputs, const Interferometer& physical,
                                         int vacuum_pads, const FuseOptions& options = {});

/// Returns the stored probability. For two-photon collisions this is
/// N_kk^2 / 2, i.e. 2 (sum_i |alpha_i U_ik|^2)(sum_j |beta_j U_jk|^2).
double outcome_probability(const FusionOutcome& outcome);

/// Heralded state expanded from Schmidt coordinates into the remainders'
/// own subsystems (ancillas contribute nothing). Small systems only.
PureState heralded_in_remainder_basis(const PureState& schmidt_coords, std::span<const FusionInput> inputs,
                                      std::size_t amplitude_cap = kDefaultAmplitudeCap);

/// Tensor factors of a two-photon collision herald (k, k):
/// (sum_i alpha_i U_ik |phi_1i>) and (sum_j beta_j U_jk |phi_2j>), each
/// normalized. A factor is empty when its unnormalized norm is below
/// sqrt(kNullOutcomeProbability).
struct CollisionFactors {
  std::optional<CVector> first;
  std::optional<CVector> second;
  double probability = 0.0;
};

/// Throws InvalidInput unless there are exactly two sources, and when both
/// factors vanish.
CollisionFactors product_form_collision(const Interferometer& u, std::span<const SchmidtSource> sources,
                                        int mode);

}  // namespace quditfuse
