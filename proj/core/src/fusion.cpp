#include "quditfuse/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "quditfuse/parallel.hpp"

namespace quditfuse {

CMatrix SchmidtForm::reconstruct() const {
  const int k = rank();
  return left_basis.leftCols(k) * coefficients.cast<Complex>().asDiagonal() * right_basis.leftCols(k).transpose();
}

SchmidtForm schmidt_decompose(const PureState& state, std::span<const std::string> left_labels, double cutoff) {
  if (left_labels.empty()) throw InvalidInput("Schmidt cut has an empty left side");
  if (left_labels.size() >= state.subsystem_count()) throw InvalidInput("Schmidt cut has an empty right side");

  SchmidtForm form;
  std::vector<bool> on_left(state.subsystem_count(), false);
  for (const auto& label : left_labels) {
    const std::size_t i = state.index_of(label);
    on_left[i] = true;
    form.left.push_back(state.subsystems()[i]);
  }
  for (std::size_t i = 0; i < state.subsystem_count(); ++i) {
    if (!on_left[i]) form.right.push_back(state.subsystems()[i]);
  }

  const CMatrix amps = state.as_matrix(left_labels);
  Eigen::JacobiSVD<CMatrix> svd(amps, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  Eigen::Index k = 0;
  while (k < s.size() && s(k) > cutoff) ++k;
  if (k == 0) throw InvalidInput("cannot Schmidt-decompose the zero vector");

  form.coefficients = s.head(k);
  form.left_basis = svd.matrixU();
  // amps = U S V^dagger, so the right Schmidt vectors are conj(V) columns.
  form.right_basis = svd.matrixV().conjugate();

  const CMatrix full = form.left_basis.leftCols(s.size()) * s.cast<Complex>().asDiagonal() *
                       form.right_basis.leftCols(s.size()).transpose();
  const double err = (full - amps).norm();
  if (err > 1e-12 * std::max(1.0, amps.norm())) {
    throw NumericError("Schmidt reconstruction error " + std::to_string(err) + " exceeds 1e-12");
  }
  return form;
}

ClusterInput::ClusterInput(PureState state, std::string leg) : state_(std::move(state)), leg_(std::move(leg)) {
  if (!state_.is_normalized()) throw InvalidInput("cluster input state must be normalized");
  const std::size_t leg_pos = state_.index_of(leg_);
  if (state_.subsystem_count() < 2) throw InvalidInput("cluster input needs at least one qudit besides the leg");
  std::vector<std::string> remainder;
  for (std::size_t i = 0; i < state_.subsystem_count(); ++i) {
    if (i != leg_pos) remainder.push_back(state_.subsystems()[i].label);
  }
  schmidt_ = schmidt_decompose(state_, remainder);
}

AncillaInput::AncillaInput(CVector leg_state) : leg_state_(std::move(leg_state)) {
  if (leg_state_.size() < 1) throw InvalidInput("ancilla leg state is empty");
  if (std::abs(leg_state_.squaredNorm() - 1.0) > kNormTolerance) {
    throw InvalidInput("ancilla leg state must be normalized");
  }
  const CMatrix seed = leg_state_;
  Eigen::HouseholderQR<CMatrix> qr(seed);
  leg_basis_ = qr.householderQ() * CMatrix::Identity(leg_state_.size(), leg_state_.size());
  // First column equals leg_state up to a phase; rotate it onto leg_state.
  const Complex phase = leg_basis_.col(0).dot(leg_state_);
  leg_basis_.col(0) *= phase / std::abs(phase);
}

AncillaInput AncillaInput::basis(int d, int j) {
  if (d < 1 || j < 0 || j >= d) throw InvalidInput("ancilla basis index out of range");
  return AncillaInput(CVector::Unit(d, j));
}

std::vector<SchmidtSource> schmidt_sources(std::span<const FusionInput> inputs) {
  std::vector<SchmidtSource> out;
  out.reserve(inputs.size());
  for (std::size_t m = 0; m < inputs.size(); ++m) {
    const std::string label = "V" + std::to_string(m + 1);
    if (const auto* c = std::get_if<ClusterInput>(&inputs[m])) {
      out.push_back({label, c->schmidt().coefficients, false});
    } else {
      out.push_back({label, RVector::Ones(1), true});
    }
  }
  return out;
}

namespace {

struct LegView {
  int leg_dim;
  int rank;
  const CMatrix* basis;
  bool ancilla;
};

LegView leg_view(const FusionInput& in) {
  if (const auto* c = std::get_if<ClusterInput>(&in)) {
    return {c->leg_dim(), c->schmidt().rank(), &c->schmidt().right_basis, false};
  }
  const auto& a = std::get<AncillaInput>(in);
  return {a.leg_dim(), 1, &a.leg_basis(), true};
}

}  // namespace

SchmidtFrame to_schmidt_frame(std::span<const FusionInput> inputs, const Interferometer& physical, int vacuum_pads) {
  if (inputs.empty()) throw InvalidInput("fusion needs at least one input");
  if (vacuum_pads < 0) throw InvalidInput("vacuum pad count must be non-negative");
  std::vector<LegView> legs;
  int leg_modes = 0;
  for (const auto& in : inputs) {
    legs.push_back(leg_view(in));
    leg_modes += legs.back().leg_dim;
  }
  const int k_modes = physical.modes();
  if (leg_modes + vacuum_pads != k_modes) {
    throw InvalidInput("interferometer has " + std::to_string(k_modes) + " modes but inputs need " +
                       std::to_string(leg_modes) + " leg modes plus " + std::to_string(vacuum_pads) + " pads");
  }

  const CMatrix& u = physical.matrix();
  CMatrix framed(k_modes, k_modes);
  std::vector<CMatrix> unused;
  std::vector<int> ranks;
  std::vector<bool> ancilla;
  int src_row = 0;
  int dst_row = 0;
  for (const auto& leg : legs) {
    const CMatrix rotated = leg.basis->transpose() * u.middleRows(src_row, leg.leg_dim);
    framed.middleRows(dst_row, leg.rank) = rotated.topRows(leg.rank);
    if (leg.leg_dim > leg.rank) unused.push_back(rotated.bottomRows(leg.leg_dim - leg.rank));
    dst_row += leg.rank;
    src_row += leg.leg_dim;
    ranks.push_back(leg.rank);
    ancilla.push_back(leg.ancilla);
  }
  int pads = 0;
  for (const auto& block : unused) {
    framed.middleRows(dst_row, block.rows()) = block;
    dst_row += static_cast<int>(block.rows());
    pads += static_cast<int>(block.rows());
  }
  framed.bottomRows(vacuum_pads) = u.bottomRows(vacuum_pads);
  pads += vacuum_pads;

  RowLayout layout(std::move(ranks), pads);
  auto roles = layout.roles(ancilla);
  return SchmidtFrame{Interferometer(std::move(framed), std::move(roles)), std::move(layout)};
}

namespace {

// Distinct arrangements of a sorted multiset of modes.
std::vector<std::vector<int>> arrangements(const DetectionPattern& pattern) {
  std::vector<std::vector<int>> out;
  std::vector<int> slots = pattern.modes();
  do {
    out.push_back(slots);
  } while (std::next_permutation(slots.begin(), slots.end()));
  return out;
}

std::vector<std::size_t> index_dims(std::span<const SchmidtSource> sources) {
  std::vector<std::size_t> dims;
  for (const auto& s : sources) dims.push_back(static_cast<std::size_t>(s.coefficients.size()));
  return dims;
}

FusionOutcome finish_outcome(const DetectionPattern& pattern, std::span<const SchmidtSource> sources,
                             CVector physical_amplitudes) {
  FusionOutcome out;
  out.pattern = pattern;
  out.relevant = pattern.collision_free();
  out.probability = physical_amplitudes.squaredNorm();
  out.norm_factor = std::sqrt(out.probability * pattern.multiplicity_factorial());
  if (out.probability >= kNullOutcomeProbability) {
    std::vector<Subsystem> subs;
    for (const auto& s : sources) subs.push_back({s.label, static_cast<int>(s.coefficients.size())});
    physical_amplitudes /= std::sqrt(out.probability);
    out.heralded_state = PureState::normalized(std::move(subs), std::move(physical_amplitudes));
  }
  return out;
}

FusionOutcome outcome_general(const CMatrix& u, const RowLayout& layout, std::span<const SchmidtSource> sources,
                              const DetectionPattern& pattern) {
  const auto dims = index_dims(sources);
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  const auto arrs = arrangements(pattern);
  const double fock = std::sqrt(pattern.multiplicity_factorial());
  const std::size_t m_count = sources.size();

  CVector amps(static_cast<Eigen::Index>(total));
  std::vector<int> digit(m_count, 0);
  std::vector<int> rows(m_count);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double weight = 1.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      rows[m] = layout.row(static_cast<int>(m), digit[m]);
      weight *= sources[m].coefficients(digit[m]);
    }
    Complex coeff{};
    for (const auto& slots : arrs) {
      Complex term{1.0, 0.0};
      for (std::size_t m = 0; m < m_count; ++m) term *= u(rows[m], slots[m]);
      coeff += term;
    }
    amps(static_cast<Eigen::Index>(flat)) = weight * coeff * fock;
    for (std::size_t m = m_count; m-- > 0;) {
      if (++digit[m] < static_cast<int>(dims[m])) break;
      digit[m] = 0;
    }
  }
  return finish_outcome(pattern, sources, std::move(amps));
}

// Closed two-photon form: sum_ij alpha_i beta_j a_{ij,kl} |phi_1i>|phi_2j>,
// with the 1/sqrt(2) Fock weight on double clicks.
FusionOutcome outcome_two_photon(const Interferometer& u, const RowLayout& layout,
                                 std::span<const SchmidtSource> sources, const DetectionPattern& pattern) {
  const int k = pattern.modes()[0];
  const int l = pattern.modes()[1];
  const auto& alpha = sources[0].coefficients;
  const auto& beta = sources[1].coefficients;
  const double weight = born_weight(pattern);
  CVector amps(alpha.size() * beta.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      const Complex a = coeff_two(u, layout.row(0, static_cast<int>(i)), layout.row(1, static_cast<int>(j)), k, l);
      amps(i * beta.size() + j) = alpha(i) * beta(j) * a * weight;
    }
  }
  return finish_outcome(pattern, sources, std::move(amps));
}

}  // namespace

namespace {

RowLayout checked_layout(std::span<const SchmidtSource> sources, const Interferometer& u, int vacuum_pads) {
  if (sources.empty()) throw InvalidInput("fusion needs at least one photon source");
  std::vector<int> ranks;
  for (const auto& s : sources) {
    if (s.coefficients.size() < 1) throw InvalidInput("source '" + s.label + "' has no Schmidt coefficients");
    if ((s.coefficients.array() <= 0.0).any()) {
      throw InvalidInput("source '" + s.label + "' has non-positive Schmidt coefficients");
    }
    ranks.push_back(static_cast<int>(s.coefficients.size()));
  }
  checked_product(ranks);
  RowLayout layout(ranks, vacuum_pads);
  if (layout.modes() != u.modes()) {
    throw InvalidInput("interferometer has " + std::to_string(u.modes()) + " modes, expected sum k_m + pads = " +
                       std::to_string(layout.modes()));
  }
  return layout;
}

bool use_two_photon(AmplitudePath path, std::size_t photons) {
  switch (path) {
    case AmplitudePath::Auto:
      return photons == 2;
    case AmplitudePath::TwoPhoton:
      if (photons != 2) throw InvalidInput("two-photon amplitude path needs exactly two sources");
      return true;
    case AmplitudePath::General:
      return false;
  }
  return false;
}

}  // namespace

FusionOutcome fuse_outcome(std::span<const SchmidtSource> sources, const Interferometer& u, int vacuum_pads,
                           const DetectionPattern& pattern, AmplitudePath path) {
  const RowLayout layout = checked_layout(sources, u, vacuum_pads);
  if (pattern.photons() != static_cast<int>(sources.size())) {
    throw InvalidInput("pattern photon count does not match the number of sources");
  }
  pattern.validate(u.modes());
  return use_two_photon(path, sources.size()) ? outcome_two_photon(u, layout, sources, pattern)
                                              : outcome_general(u.matrix(), layout, sources, pattern);
}

std::vector<FusionOutcome> fuse(std::span<const SchmidtSource> sources, const Interferometer& u, int vacuum_pads,
                                const FuseOptions& options) {
  const RowLayout layout = checked_layout(sources, u, vacuum_pads);
  const bool two_photon = use_two_photon(options.path, sources.size());
  const auto patterns = enumerate_patterns(u.modes(), static_cast<int>(sources.size()));
  std::vector<FusionOutcome> outcomes(patterns.size());
  parallel_for(patterns.size(), options.threads, [&](std::size_t p) {
    outcomes[p] = two_photon ? outcome_two_photon(u, layout, sources, patterns[p])
                             : outcome_general(u.matrix(), layout, sources, patterns[p]);
  });
  return outcomes;
}

std::vector<FusionOutcome> fuse(std::span<const FusionInput> inputs, const Interferometer& u, int vacuum_pads,
                                const FuseOptions& options) {
  const auto sources = schmidt_sources(inputs);
  return fuse(std::span<const SchmidtSource>(sources), u, vacuum_pads, options);
}

std::vector<FusionOutcome> fuse_physical(std::span<const FusionInput> inputs, const Interferometer& physical,
                                         int vacuum_pads, const FuseOptions& options) {
  const auto frame = to_schmidt_frame(inputs, physical, vacuum_pads);
  const auto sources = schmidt_sources(inputs);
  return fuse(std::span<const SchmidtSource>(sources), frame.unitary, frame.layout.vacuum_pads(), options);
}

double outcome_probability(const FusionOutcome& outcome) { return outcome.probability; }

PureState heralded_in_remainder_basis(const PureState& schmidt_coords, std::span<const FusionInput> inputs,
                                      std::size_t amplitude_cap) {
  if (schmidt_coords.subsystem_count() != inputs.size()) {
    throw InvalidInput("heralded state and input list disagree on the number of sources");
  }
  std::vector<Subsystem> subs;
  std::vector<const CMatrix*> bases;
  std::vector<int> kept;
  for (std::size_t m = 0; m < inputs.size(); ++m) {
    const auto* c = std::get_if<ClusterInput>(&inputs[m]);
    if (!c) continue;
    if (schmidt_coords.subsystems()[m].dim != c->schmidt().rank()) {
      throw InvalidInput("heralded state dimension does not match the Schmidt rank of input " + std::to_string(m));
    }
    for (const auto& s : c->schmidt().left) subs.push_back({"V" + std::to_string(m + 1) + "." + s.label, s.dim});
    bases.push_back(&c->schmidt().left_basis);
    kept.push_back(static_cast<int>(m));
  }
  if (subs.empty()) throw InvalidInput("no cluster remainders to expand into");
  std::vector<int> dims;
  for (const auto& s : subs) dims.push_back(s.dim);
  const std::size_t total = checked_product(dims, amplitude_cap);

  CVector out = CVector::Zero(static_cast<Eigen::Index>(total));
  for (std::size_t flat = 0; flat < schmidt_coords.size(); ++flat) {
    const Complex c = schmidt_coords.amplitudes()(static_cast<Eigen::Index>(flat));
    if (c == Complex{}) continue;
    const auto digit = schmidt_coords.digits(flat);
    CVector term = CVector::Ones(1) * c;
    for (std::size_t q = 0; q < kept.size(); ++q) {
      const CVector phi = bases[q]->col(digit[static_cast<std::size_t>(kept[q])]);
      CVector next(term.size() * phi.size());
      for (Eigen::Index a = 0; a < term.size(); ++a) next.segment(a * phi.size(), phi.size()) = term(a) * phi;
      term = std::move(next);
    }
    out += term;
  }
  return schmidt_coords.is_normalized() ? PureState::normalized(std::move(subs), std::move(out))
                                        : PureState::unnormalized(std::move(subs), std::move(out));
}

CollisionFactors product_form_collision(const Interferometer& u, std::span<const SchmidtSource> sources, int mode) {
  if (sources.size() != 2) throw InvalidInput("collision factorization needs exactly two sources");
  if (mode < 0 || mode >= u.modes()) throw InvalidInput("collision mode out of range");
  const RowLayout layout({static_cast<int>(sources[0].coefficients.size()),
                          static_cast<int>(sources[1].coefficients.size())},
                         u.modes() - static_cast<int>(sources[0].coefficients.size() + sources[1].coefficients.size()));
  auto factor = [&](int src) {
    const auto& coeffs = sources[static_cast<std::size_t>(src)].coefficients;
    CVector f(coeffs.size());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) f(i) = coeffs(i) * u.matrix()(layout.row(src, static_cast<int>(i)), mode);
    return f;
  };
  const CVector f1 = factor(0);
  const CVector f2 = factor(1);
  CollisionFactors out;
  out.probability = 2.0 * f1.squaredNorm() * f2.squaredNorm();
  const double floor = std::sqrt(kNullOutcomeProbability);
  if (f1.norm() >= floor) out.first = f1 / f1.norm();
  if (f2.norm() >= floor) out.second = f2 / f2.norm();
  if (!out.first && !out.second) {
    throw InvalidInput("collision pattern (" + std::to_string(mode) + ", " + std::to_string(mode) +
                       ") has zero probability with both factors null");
  }
  return out;
}

}  // namespace quditfuse
