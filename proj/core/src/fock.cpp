#include "quditfuse/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace quditfuse {

double unitarity_defect(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  const CMatrix residual = u * u.adjoint() - CMatrix::Identity(u.rows(), u.cols());
  return residual.cwiseAbs().maxCoeff();
}

Interferometer::Interferometer(CMatrix matrix, std::vector<ModeRole> roles)
    : matrix_(std::move(matrix)), roles_(std::move(roles)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    throw InvalidInput("interferometer matrix must be square and non-empty");
  }
  if (!matrix_.allFinite()) throw InvalidInput("interferometer matrix has non-finite entries");
  const double defect = unitarity_defect(matrix_);
  if (defect > kUnitarityTolerance) {
    throw InvalidInput("interferometer matrix is not unitary (max |UU^dagger - I| = " +
                       std::to_string(defect) + ")");
  }
  if (roles_.empty()) {
    roles_.assign(static_cast<std::size_t>(matrix_.rows()), ModeRole{});
  } else if (roles_.size() != static_cast<std::size_t>(matrix_.rows())) {
    throw InvalidInput("mode role list length does not match interferometer size");
  }
}

Interferometer Interferometer::identity(int modes) {
  return Interferometer(CMatrix::Identity(modes, modes));
}

RowLayout::RowLayout(std::vector<int> rows_per_source, int vacuum_pads)
    : rows_(std::move(rows_per_source)), pads_(vacuum_pads) {
  if (pads_ < 0) throw InvalidInput("vacuum pad count must be non-negative");
  int offset = 0;
  for (int k : rows_) {
    if (k < 1) throw InvalidInput("each photon source needs at least one row");
    offsets_.push_back(offset);
    offset += k;
  }
  modes_ = offset + pads_;
}

int RowLayout::row(int source, int i) const {
  if (source < 0 || source >= sources()) throw InvalidInput("photon source index out of range");
  if (i < 0 || i >= rows_[static_cast<std::size_t>(source)]) {
    throw InvalidInput("Schmidt index out of range for source " + std::to_string(source));
  }
  return offsets_[static_cast<std::size_t>(source)] + i;
}

std::vector<ModeRole> RowLayout::roles(const std::vector<bool>& is_ancilla) const {
  if (is_ancilla.size() != rows_.size()) throw InvalidInput("ancilla flag list has wrong length");
  std::vector<ModeRole> out;
  out.reserve(static_cast<std::size_t>(modes_));
  for (std::size_t m = 0; m < rows_.size(); ++m) {
    const auto kind = is_ancilla[m] ? ModeRoleKind::AncillaPhoton : ModeRoleKind::ClusterLeg;
    for (int i = 0; i < rows_[m]; ++i) out.push_back({kind, static_cast<int>(m)});
  }
  for (int p = 0; p < pads_; ++p) out.push_back({ModeRoleKind::VacuumPad, -1});
  return out;
}

DetectionPattern::DetectionPattern(std::vector<int> modes) : modes_(std::move(modes)) {
  for (int m : modes_) {
    if (m < 0) throw InvalidInput("detection mode indices must be non-negative");
  }
  std::sort(modes_.begin(), modes_.end());
}

bool DetectionPattern::collision_free() const noexcept {
  return std::adjacent_find(modes_.begin(), modes_.end()) == modes_.end();
}

int DetectionPattern::distinct_modes() const noexcept {
  int n = 0;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (i == 0 || modes_[i] != modes_[i - 1]) ++n;
  }
  return n;
}

std::vector<int> DetectionPattern::occupations(int modes) const {
  validate(modes);
  std::vector<int> n(static_cast<std::size_t>(modes), 0);
  for (int m : modes_) ++n[static_cast<std::size_t>(m)];
  return n;
}

double DetectionPattern::multiplicity_factorial() const noexcept {
  double f = 1.0;
  std::size_t run = 0;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    run = (i > 0 && modes_[i] == modes_[i - 1]) ? run + 1 : 1;
    f *= static_cast<double>(run);
  }
  return f;
}

void DetectionPattern::validate(int modes) const {
  for (int m : modes_) {
    if (m >= modes) {
      throw InvalidInput("detection mode " + std::to_string(m) + " outside device with " +
                         std::to_string(modes) + " modes");
    }
  }
}

std::string DetectionPattern::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(modes_[i]);
  }
  return s;
}

std::vector<DetectionPattern> enumerate_patterns(int modes, int photons) {
  if (modes < 1 || photons < 1) throw InvalidInput("need at least one mode and one photon");
  std::vector<DetectionPattern> out;
  std::vector<int> current(static_cast<std::size_t>(photons), 0);
  while (true) {
    out.emplace_back(current);
    // Next non-decreasing sequence.
    int pos = photons - 1;
    while (pos >= 0 && current[static_cast<std::size_t>(pos)] == modes - 1) --pos;
    if (pos < 0) break;
    const int v = current[static_cast<std::size_t>(pos)] + 1;
    for (int i = pos; i < photons; ++i) current[static_cast<std::size_t>(i)] = v;
  }
  return out;
}

Complex coeff_two(const Interferometer& u, int i, int j, int k, int l) {
  const auto& m = u.matrix();
  const int n = u.modes();
  for (int x : {i, j, k, l}) {
    if (x < 0 || x >= n) throw InvalidInput("coeff_two index out of range");
  }
  return m(i, k) * m(j, l) + m(i, l) * m(j, k);
}

namespace {

std::vector<int> input_rows(const Interferometer& u, const RowLayout& layout, std::span<const int> inputs,
                            const DetectionPattern& pattern) {
  if (layout.modes() != u.modes()) {
    throw InvalidInput("row layout describes " + std::to_string(layout.modes()) +
                       " modes but the interferometer has " + std::to_string(u.modes()));
  }
  if (static_cast<int>(inputs.size()) != layout.sources()) {
    throw InvalidInput("input multi-index length does not match the number of photon sources");
  }
  if (pattern.photons() != layout.sources()) {
    throw InvalidInput("pattern has " + std::to_string(pattern.photons()) + " clicks but there are " +
                       std::to_string(layout.sources()) + " photons");
  }
  pattern.validate(u.modes());
  std::vector<int> rows(inputs.size());
  for (std::size_t m = 0; m < inputs.size(); ++m) rows[m] = layout.row(static_cast<int>(m), inputs[m]);
  return rows;
}

}  // namespace

Complex coeff_multi(const Interferometer& u, const RowLayout& layout, std::span<const int> inputs,
                    const DetectionPattern& pattern) {
  const auto rows = input_rows(u, layout, inputs, pattern);
  const auto& m = u.matrix();
  // next_permutation over the sorted multiset visits each distinct
  // arrangement exactly once.
  std::vector<int> slots = pattern.modes();
  Complex sum{};
  do {
    Complex term{1.0, 0.0};
    for (std::size_t p = 0; p < rows.size(); ++p) term *= m(rows[p], slots[p]);
    sum += term;
  } while (std::next_permutation(slots.begin(), slots.end()));
  return sum;
}

Complex symmetric_sum(const Interferometer& u, const RowLayout& layout, std::span<const int> inputs,
                      const DetectionPattern& pattern) {
  const auto rows = input_rows(u, layout, inputs, pattern);
  const auto& m = u.matrix();
  std::vector<std::size_t> perm(rows.size());
  std::iota(perm.begin(), perm.end(), 0);
  const auto& slots = pattern.modes();
  Complex sum{};
  do {
    Complex term{1.0, 0.0};
    for (std::size_t p = 0; p < rows.size(); ++p) term *= m(rows[p], slots[perm[p]]);
    sum += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum;
}

double born_weight(const DetectionPattern& pattern) {
  return 1.0 / std::sqrt(pattern.multiplicity_factorial());
}

Complex fock_amplitude(const Interferometer& u, const RowLayout& layout, std::span<const int> inputs,
                       const DetectionPattern& pattern) {
  return coeff_multi(u, layout, inputs, pattern) * std::sqrt(pattern.multiplicity_factorial());
}

std::map<DetectionPattern, Complex> oracle_expand(const Interferometer& u, const RowLayout& layout,
                                                  std::span<const int> inputs) {
  constexpr int kMaxPhotons = 5;
  constexpr int kMaxModes = 10;
  const int k_modes = u.modes();
  if (static_cast<int>(inputs.size()) > kMaxPhotons || k_modes > kMaxModes) {
    throw CapacityExceeded("oracle_expand is limited to 5 photons and 10 modes");
  }
  if (layout.modes() != k_modes || static_cast<int>(inputs.size()) != layout.sources()) {
    throw InvalidInput("oracle_expand: layout does not match interferometer or inputs");
  }
  const auto& m = u.matrix();

  using Monomial = std::vector<int>;  // occupation numbers
  std::map<Monomial, Complex> poly{{Monomial(static_cast<std::size_t>(k_modes), 0), Complex{1.0, 0.0}}};
  for (std::size_t src = 0; src < inputs.size(); ++src) {
    const int r = layout.row(static_cast<int>(src), inputs[src]);
    std::map<Monomial, Complex> next;
    for (const auto& [mono, c] : poly) {
      for (int k = 0; k < k_modes; ++k) {
        Monomial grown = mono;
        ++grown[static_cast<std::size_t>(k)];
        next[grown] += c * m(r, k);
      }
    }
    poly = std::move(next);
  }

  std::map<DetectionPattern, Complex> out;
  for (const auto& [mono, c] : poly) {
    std::vector<int> clicks;
    for (int k = 0; k < k_modes; ++k) clicks.insert(clicks.end(), static_cast<std::size_t>(mono[static_cast<std::size_t>(k)]), k);
    out.emplace(DetectionPattern(std::move(clicks)), c);
  }
  return out;
}

CMatrix qubit_type2_unitary() {
  CMatrix u(4, 4);
  u << 1, 1, 1, -1,  //
      1, 1, -1, 1,   //
      1, -1, 1, 1,   //
      -1, 1, 1, 1;
  return 0.5 * u;
}

}  // namespace quditfuse
