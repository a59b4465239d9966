#include "quditfuse/graphstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace quditfuse {

CMatrix pauli_x(QuditDim dim) {
  const int d = dim.value();
  CMatrix x = CMatrix::Zero(d, d);
  // X = sum_j |j><j+1|, so X|j> = |j-1 mod d> and XZ = omega ZX.
  for (int j = 0; j < d; ++j) x(j, (j + 1) % d) = 1.0;
  return x;
}

CMatrix pauli_z(QuditDim dim) {
  const int d = dim.value();
  CMatrix z = CMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) z(j, j) = dim.omega_pow(j);
  return z;
}

CMatrix cz_gate(QuditDim dim) {
  const int d = dim.value();
  CMatrix s = CMatrix::Zero(d * d, d * d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) s(j * d + k, j * d + k) = dim.omega_pow(static_cast<long long>(j) * k);
  }
  return s;
}

QuditGraph::QuditGraph(QuditDim dim, std::vector<std::string> vertices,
                       const std::vector<std::pair<std::string, std::string>>& edges)
    : dim_(dim), vertices_(std::move(vertices)) {
  std::set<std::string> seen;
  for (const auto& v : vertices_) {
    if (v.empty()) throw InvalidInput("vertex labels must be non-empty");
    if (!seen.insert(v).second) throw InvalidInput("duplicate vertex '" + v + "'");
  }
  std::set<std::pair<std::size_t, std::size_t>> seen_edges;
  for (const auto& [a, b] : edges) {
    const std::size_t i = index_of(a);
    const std::size_t j = index_of(b);
    if (i == j) throw InvalidInput("self-loop on vertex '" + a + "'");
    const auto key = std::minmax(i, j);
    if (!seen_edges.insert(key).second) {
      throw InvalidInput("duplicate edge {" + a + ", " + b + "}");
    }
    edges_.emplace_back(key.first, key.second);
  }
}

std::size_t QuditGraph::index_of(const std::string& vertex) const {
  const auto it = std::find(vertices_.begin(), vertices_.end(), vertex);
  if (it == vertices_.end()) throw InvalidInput("unknown vertex '" + vertex + "'");
  return static_cast<std::size_t>(it - vertices_.begin());
}

std::vector<std::size_t> QuditGraph::neighbors(std::size_t vertex) const {
  std::vector<std::size_t> out;
  for (const auto& [a, b] : edges_) {
    if (a == vertex) out.push_back(b);
    if (b == vertex) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Subsystem> QuditGraph::subsystems() const {
  std::vector<Subsystem> subs;
  subs.reserve(vertices_.size());
  for (const auto& v : vertices_) subs.push_back({v, dim_.value()});
  return subs;
}

PureState build_graph_state(const QuditGraph& graph, std::size_t amplitude_cap) {
  const auto subs = graph.subsystems();
  std::vector<int> dims(subs.size(), graph.dim().value());
  const std::size_t total = checked_product(dims, amplitude_cap);
  const double scale = std::pow(static_cast<double>(graph.dim().value()), -0.5 * static_cast<double>(subs.size()));

  CVector amps(static_cast<Eigen::Index>(total));
  std::vector<int> digit(subs.size(), 0);
  const int d = graph.dim().value();
  for (std::size_t flat = 0; flat < total; ++flat) {
    long long exponent = 0;
    for (const auto& [a, b] : graph.edges()) exponent += static_cast<long long>(digit[a]) * digit[b];
    amps(static_cast<Eigen::Index>(flat)) = scale * graph.dim().omega_pow(exponent);
    for (std::size_t i = digit.size(); i-- > 0;) {
      if (++digit[i] < d) break;
      digit[i] = 0;
    }
  }
  return PureState::normalized(subs, std::move(amps));
}

namespace {

std::vector<std::size_t> strides_of(const std::vector<Subsystem>& subs) {
  std::vector<std::size_t> stride(subs.size(), 1);
  for (std::size_t i = subs.size(); i-- > 1;) {
    stride[i - 1] = stride[i] * static_cast<std::size_t>(subs[i].dim);
  }
  return stride;
}

// Applies a (d_a d_b) x (d_a d_b) operator to sites a and b, with the
// operator's own index ordered as (site a, site b), row-major.
void apply_two_site(CVector& amps, const std::vector<Subsystem>& subs, std::size_t a, std::size_t b,
                    const CMatrix& op) {
  const auto stride = strides_of(subs);
  const int da = subs[a].dim;
  const int db = subs[b].dim;
  const auto total = static_cast<std::size_t>(amps.size());
  CVector block(da * db);
  for (std::size_t base = 0; base < total; ++base) {
    const int ja = static_cast<int>((base / stride[a]) % static_cast<std::size_t>(da));
    const int jb = static_cast<int>((base / stride[b]) % static_cast<std::size_t>(db));
    if (ja != 0 || jb != 0) continue;
    for (int x = 0; x < da; ++x) {
      for (int y = 0; y < db; ++y) {
        block(x * db + y) = amps(static_cast<Eigen::Index>(base + x * stride[a] + y * stride[b]));
      }
    }
    const CVector out = op * block;
    for (int x = 0; x < da; ++x) {
      for (int y = 0; y < db; ++y) {
        amps(static_cast<Eigen::Index>(base + x * stride[a] + y * stride[b])) = out(x * db + y);
      }
    }
  }
}

}  // namespace

PureState build_graph_state_by_gates(const QuditGraph& graph, std::size_t amplitude_cap) {
  const auto subs = graph.subsystems();
  std::vector<int> dims(subs.size(), graph.dim().value());
  const std::size_t total = checked_product(dims, amplitude_cap);
  const double plus = 1.0 / std::sqrt(static_cast<double>(total));
  CVector amps = CVector::Constant(static_cast<Eigen::Index>(total), Complex(plus, 0.0));
  const CMatrix s = cz_gate(graph.dim());
  for (const auto& [a, b] : graph.edges()) apply_two_site(amps, subs, a, b, s);
  amps /= amps.norm();
  return PureState::normalized(subs, std::move(amps));
}

SiteProductOperator::SiteProductOperator(std::vector<Subsystem> sites, std::vector<Factor> factors)
    : sites_(std::move(sites)), factors_(std::move(factors)) {
  std::vector<bool> used(sites_.size(), false);
  for (const auto& f : factors_) {
    if (f.site >= sites_.size()) throw InvalidInput("operator factor on unknown site");
    if (used[f.site]) throw InvalidInput("two operator factors on the same site");
    used[f.site] = true;
    const int d = sites_[f.site].dim;
    if (f.op.rows() != d || f.op.cols() != d) throw InvalidInput("operator factor has wrong shape");
  }
}

CVector SiteProductOperator::apply(const CVector& amplitudes) const {
  std::vector<int> dims;
  for (const auto& s : sites_) dims.push_back(s.dim);
  if (static_cast<std::size_t>(amplitudes.size()) != checked_product(dims, std::numeric_limits<std::size_t>::max())) {
    throw InvalidInput("state size does not match operator layout");
  }
  const auto stride = strides_of(sites_);
  const auto total = static_cast<std::size_t>(amplitudes.size());
  CVector out = amplitudes;
  for (const auto& f : factors_) {
    const int d = sites_[f.site].dim;
    const std::size_t st = stride[f.site];
    CVector next = CVector::Zero(out.size());
    for (std::size_t flat = 0; flat < total; ++flat) {
      const int j = static_cast<int>((flat / st) % static_cast<std::size_t>(d));
      const std::size_t base = flat - static_cast<std::size_t>(j) * st;
      const Complex a = out(static_cast<Eigen::Index>(flat));
      if (a == Complex{}) continue;
      for (int i = 0; i < d; ++i) {
        const Complex m = f.op(i, j);
        if (m != Complex{}) next(static_cast<Eigen::Index>(base + i * st)) += m * a;
      }
    }
    out = std::move(next);
  }
  return out;
}

CMatrix SiteProductOperator::dense(std::size_t amplitude_cap) const {
  std::vector<int> dims;
  for (const auto& s : sites_) dims.push_back(s.dim);
  const auto n = static_cast<Eigen::Index>(checked_product(dims, amplitude_cap));
  CMatrix m(n, n);
  for (Eigen::Index c = 0; c < n; ++c) m.col(c) = apply(CVector::Unit(n, c));
  return m;
}

SiteProductOperator stabilizer(const QuditGraph& graph, const std::string& vertex) {
  const std::size_t a = graph.index_of(vertex);
  std::vector<SiteProductOperator::Factor> factors;
  factors.push_back({a, pauli_x(graph.dim()).adjoint()});
  const CMatrix z = pauli_z(graph.dim());
  for (std::size_t b : graph.neighbors(a)) factors.push_back({b, z});
  return SiteProductOperator(graph.subsystems(), std::move(factors));
}

bool StabilizerReport::passed() const {
  return std::all_of(residuals.begin(), residuals.end(), [&](double r) { return r < tolerance; });
}

double StabilizerReport::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

StabilizerReport verify_stabilizers(const QuditGraph& graph, const PureState& state, double tol) {
  if (state.subsystems() != graph.subsystems()) {
    throw InvalidInput("state layout does not match the graph's vertices and dimension");
  }
  StabilizerReport report;
  report.tolerance = tol;
  for (const auto& v : graph.vertices()) {
    const CVector moved = stabilizer(graph, v).apply(state.amplitudes());
    report.vertices.push_back(v);
    report.residuals.push_back((moved - state.amplitudes()).norm());
  }
  return report;
}

}  // namespace quditfuse
