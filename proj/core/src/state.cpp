#include "quditfuse/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_set>

namespace quditfuse {

QuditDim::QuditDim(int d) : d_(d) {
  if (d < 2) {
    throw InvalidInput("qudit dimension must be >= 2, got " + std::to_string(d));
  }
}

Complex QuditDim::omega() const noexcept { return omega_pow(1); }

Complex QuditDim::omega_pow(long long e) const noexcept {
  long long r = e % d_;
  if (r < 0) r += d_;
  if (r == 0) return {1.0, 0.0};
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / d_;
  return std::polar(1.0, angle);
}

std::size_t checked_product(std::span<const int> dims, std::size_t cap) {
  std::size_t total = 1;
  for (int d : dims) {
    if (d < 1) throw InvalidInput("subsystem dimension must be >= 1");
    if (total > cap / static_cast<std::size_t>(d)) {
      throw CapacityExceeded("state would exceed the amplitude cap of " + std::to_string(cap) +
                             " entries");
    }
    total *= static_cast<std::size_t>(d);
  }
  if (total > cap) {
    throw CapacityExceeded("state would exceed the amplitude cap of " + std::to_string(cap) +
                           " entries");
  }
  return total;
}

namespace {

void validate_layout(const std::vector<Subsystem>& subsystems, const CVector& amplitudes) {
  std::unordered_set<std::string> seen;
  std::vector<int> dims;
  dims.reserve(subsystems.size());
  for (const auto& s : subsystems) {
    if (!seen.insert(s.label).second) {
      throw InvalidInput("duplicate subsystem label '" + s.label + "'");
    }
    dims.push_back(s.dim);
  }
  const std::size_t expected = checked_product(dims, std::numeric_limits<std::size_t>::max());
  if (static_cast<std::size_t>(amplitudes.size()) != expected) {
    throw InvalidInput("amplitude vector has length " + std::to_string(amplitudes.size()) +
                       ", expected " + std::to_string(expected));
  }
}

}  // namespace

PureState::PureState(std::vector<Subsystem> subsystems, CVector amplitudes, bool normalized)
    : subsystems_(std::move(subsystems)), amplitudes_(std::move(amplitudes)), normalized_(normalized) {}

PureState PureState::normalized(std::vector<Subsystem> subsystems, CVector amplitudes) {
  validate_layout(subsystems, amplitudes);
  const double n2 = amplitudes.squaredNorm();
  if (std::abs(n2 - 1.0) > kNormTolerance) {
    throw InvalidInput("state is not normalized (squared norm " + std::to_string(n2) + ")");
  }
  return PureState(std::move(subsystems), std::move(amplitudes), true);
}

PureState PureState::unnormalized(std::vector<Subsystem> subsystems, CVector amplitudes) {
  validate_layout(subsystems, amplitudes);
  return PureState(std::move(subsystems), std::move(amplitudes), false);
}

std::size_t PureState::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    if (subsystems_[i].label == label) return i;
  }
  throw InvalidInput("unknown subsystem '" + label + "'");
}

bool PureState::has(const std::string& label) const noexcept {
  return std::any_of(subsystems_.begin(), subsystems_.end(),
                     [&](const Subsystem& s) { return s.label == label; });
}

std::vector<int> PureState::dims() const {
  std::vector<int> out;
  out.reserve(subsystems_.size());
  for (const auto& s : subsystems_) out.push_back(s.dim);
  return out;
}

std::size_t PureState::flat_index(std::span<const int> digits) const {
  if (digits.size() != subsystems_.size()) {
    throw InvalidInput("multi-index has wrong length");
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    const int d = subsystems_[i].dim;
    if (digits[i] < 0 || digits[i] >= d) throw InvalidInput("multi-index digit out of range");
    flat = flat * static_cast<std::size_t>(d) + static_cast<std::size_t>(digits[i]);
  }
  return flat;
}

std::vector<int> PureState::digits(std::size_t flat) const {
  std::vector<int> out(subsystems_.size());
  for (std::size_t i = subsystems_.size(); i-- > 0;) {
    const auto d = static_cast<std::size_t>(subsystems_[i].dim);
    out[i] = static_cast<int>(flat % d);
    flat /= d;
  }
  return out;
}

PureState PureState::permuted(std::span<const std::size_t> order) const {
  const std::size_t n = subsystems_.size();
  if (order.size() != n) throw InvalidInput("permutation has wrong length");
  std::vector<bool> used(n, false);
  std::vector<Subsystem> subs;
  subs.reserve(n);
  for (std::size_t p : order) {
    if (p >= n || used[p]) throw InvalidInput("invalid subsystem permutation");
    used[p] = true;
    subs.push_back(subsystems_[p]);
  }

  // Strides of the old layout, looked up in new order.
  std::vector<std::size_t> old_stride(n, 1);
  for (std::size_t i = n; i-- > 1;) {
    old_stride[i - 1] = old_stride[i] * static_cast<std::size_t>(subsystems_[i].dim);
  }

  CVector out(amplitudes_.size());
  std::vector<int> digit(n, 0);
  for (Eigen::Index flat = 0; flat < out.size(); ++flat) {
    std::size_t src = 0;
    for (std::size_t i = 0; i < n; ++i) src += static_cast<std::size_t>(digit[i]) * old_stride[order[i]];
    out(flat) = amplitudes_(static_cast<Eigen::Index>(src));
    for (std::size_t i = n; i-- > 0;) {
      if (++digit[i] < subs[i].dim) break;
      digit[i] = 0;
    }
  }
  return PureState(std::move(subs), std::move(out), normalized_);
}

CMatrix PureState::as_matrix(std::span<const std::string> row_labels) const {
  std::vector<std::size_t> order;
  std::vector<bool> in_rows(subsystems_.size(), false);
  for (const auto& label : row_labels) {
    const std::size_t i = index_of(label);
    if (in_rows[i]) throw InvalidInput("subsystem '" + label + "' listed twice");
    in_rows[i] = true;
    order.push_back(i);
  }
  Eigen::Index rows = 1;
  for (std::size_t i : order) rows *= subsystems_[i].dim;
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    if (!in_rows[i]) order.push_back(i);
  }
  const PureState p = permuted(order);
  const Eigen::Index cols = p.amplitudes_.size() / rows;
  // Row-major flat layout: entry (r, c) sits at r * cols + c.
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = p.amplitudes_(r * cols + c);
  }
  return m;
}

}  // namespace quditfuse
