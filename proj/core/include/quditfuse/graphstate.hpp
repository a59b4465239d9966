#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quditfuse/state.hpp"

namespace quditfuse {

/// Shift operator X = |0><1| + |1><2| + ... + |d-1><0|, i.e. X|j> = |j-1 mod d>.
/// This is the orientation for which XZ = omega ZX and X_a^dagger prod Z_b
/// stabilizes the S_ab graph state.
CMatrix pauli_x(QuditDim dim);
/// Clock operator: Z|j> = omega^j |j>.
CMatrix pauli_z(QuditDim dim);
/// Controlled-phase S_ab = sum_{j,k} omega^{jk} |j,k><j,k| on two qudits.
CMatrix cz_gate(QuditDim dim);

/// Undirected simple graph over named qudits.
class QuditGraph {
 public:
  /// Edges are given by vertex label. Throws InvalidInput on self-loops,
  /// duplicate edges, duplicate vertices or undeclared endpoints.
  QuditGraph(QuditDim dim, std::vector<std::string> vertices,
             const std::vector<std::pair<std::string, std::string>>& edges);

  QuditDim dim() const noexcept { return dim_; }
  const std::vector<std::string>& vertices() const noexcept { return vertices_; }
  /// Edges as (i, j) vertex positions with i < j, in insertion order.
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept { return edges_; }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t index_of(const std::string& vertex) const;
  std::vector<std::size_t> neighbors(std::size_t vertex) const;

  /// Subsystem layout of the graph state: one d-level subsystem per vertex.
  std::vector<Subsystem> subsystems() const;

 private:
  QuditDim dim_;
  std::vector<std::string> vertices_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

/// Parses `{ "d": 3, "vertices": [..], "edges": [[a, b], ..] }`. When
/// `expected_dim` is given, "d" may be omitted and must match if present.
QuditGraph parse_graph_json(std::string_view text, std::optional<int> expected_dim = std::nullopt);
std::string graph_to_json(const QuditGraph& graph);

/// Graph state from the closed form d^{-n/2} omega^{sum_E j_a j_b}.
PureState build_graph_state(const QuditGraph& graph, std::size_t amplitude_cap = kDefaultAmplitudeCap);

/// Graph state by applying S_ab for every edge to |+>^n, one gate at a time.
/// Kept as an independent cross-check of build_graph_state.
PureState build_graph_state_by_gates(const QuditGraph& graph,
                                     std::size_t amplitude_cap = kDefaultAmplitudeCap);

/// Tensor product of single-site operators; identity on unlisted sites.
class SiteProductOperator {
 public:
  struct Factor {
    std::size_t site;
    CMatrix op;
  };

  SiteProductOperator(std::vector<Subsystem> sites, std::vector<Factor> factors);

  const std::vector<Subsystem>& sites() const noexcept { return sites_; }
  const std::vector<Factor>& factors() const noexcept { return factors_; }

  /// Applies the operator to a state with the same subsystem layout.
  CVector apply(const CVector& amplitudes) const;
  /// Dense matrix over the full space; intended for small systems only.
  CMatrix dense(std::size_t amplitude_cap = 1 << 12) const;

 private:
  std::vector<Subsystem> sites_;
  std::vector<Factor> factors_;
};

/// K_a = X_a^dagger prod_{b ~ a} Z_b.
SiteProductOperator stabilizer(const QuditGraph& graph, const std::string& vertex);

struct StabilizerReport {
  std::vector<std::string> vertices;
  std::vector<double> residuals;  ///< ||K_a psi - psi|| per vertex
  double tolerance = 0.0;

  bool passed() const;
  double max_residual() const;
};

/// Residual of every stabilizer equation. Throws InvalidInput if the state's
/// layout does not match the graph.
StabilizerReport verify_stabilizers(const QuditGraph& graph, const PureState& state, double tol = 1e-12);

}  // namespace quditfuse
