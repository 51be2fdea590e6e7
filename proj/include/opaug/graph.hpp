#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "opaug/linalg.hpp"

namespace opaug {

using ParameterVector = std::vector<double>;
using Edge = std::pair<std::size_t, std::size_t>;

struct IncidenceStructure {
  std::size_t vertex_count = 0;
  std::vector<Edge> edges;
  std::vector<std::size_t> interior;
  std::vector<std::size_t> boundary;

  /// Interior is the sorted complement of `boundary`.
  static IncidenceStructure make(std::size_t vertex_count, std::vector<Edge> edges,
                                 std::vector<std::size_t> boundary = {});
  std::size_t edge_count() const { return edges.size(); }
};

/// The weight-to-operator map: (E diag(w) Eᵀ) on the interior minor, plus γI.
/// Sparsity pattern is fixed per structure, so zero weights keep explicit zeros.
class LaplacianMap {
 public:
  LaplacianMap(IncidenceStructure structure, double gamma);

  const IncidenceStructure& structure() const { return structure_; }
  double gamma() const { return gamma_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(structure_.interior.size()); }
  std::size_t edge_count() const { return structure_.edges.size(); }

  SpdOperator assemble(std::span<const double> weights) const;

 private:
  IncidenceStructure structure_;
  double gamma_ = 0.0;
  SparseMatrix pattern_;
  std::vector<Eigen::Index> diag_slot_;
  // per edge: diag(u), diag(v), (u,v), (v,u); -1 where an endpoint is boundary
  std::vector<std::array<Eigen::Index, 4>> edge_slots_;
};

}  // namespace opaug
