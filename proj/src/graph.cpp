#include "opaug/graph.hpp"

#include <algorithm>
#include <string>

namespace opaug {

IncidenceStructure IncidenceStructure::make(std::size_t vertex_count, std::vector<Edge> edges,
                                            std::vector<std::size_t> boundary) {
  IncidenceStructure s;
  s.vertex_count = vertex_count;
  for (const auto& [u, v] : edges) {
    if (u >= vertex_count || v >= vertex_count) {
      throw Error(ErrorCode::StructureMismatch, "edge endpoint out of range");
    }
    if (u == v) throw Error(ErrorCode::SelfLoop, "self-loop at vertex " + std::to_string(u));
  }
  std::sort(boundary.begin(), boundary.end());
  if (std::adjacent_find(boundary.begin(), boundary.end()) != boundary.end()) {
    throw Error(ErrorCode::StructureMismatch, "duplicate boundary vertex");
  }
  if (!boundary.empty() && boundary.back() >= vertex_count) {
    throw Error(ErrorCode::StructureMismatch, "boundary vertex out of range");
  }
  std::vector<bool> on_boundary(vertex_count, false);
  for (auto b : boundary) on_boundary[b] = true;
  for (std::size_t v = 0; v < vertex_count; ++v) {
    if (!on_boundary[v]) s.interior.push_back(v);
  }
  s.edges = std::move(edges);
  s.boundary = std::move(boundary);
  return s;
}

LaplacianMap::LaplacianMap(IncidenceStructure structure, double gamma)
    : structure_(std::move(structure)), gamma_(gamma) {
  if (structure_.interior.empty()) throw Error(ErrorCode::InvalidSize, "no interior vertices");
  if (gamma_ < 0.0) throw Error(ErrorCode::InvalidShift, "gamma must be nonnegative");
  std::vector<Eigen::Index> index(structure_.vertex_count, -1);
  for (std::size_t i = 0; i < structure_.interior.size(); ++i) {
    index[structure_.interior[i]] = static_cast<Eigen::Index>(i);
  }
  const auto n = dim();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n + 2 * structure_.edges.size());
  for (Eigen::Index i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
  for (const auto& [u, v] : structure_.edges) {
    const auto a = index[u], b = index[v];
    if (a >= 0 && b >= 0) {
      trip.emplace_back(a, b, 1.0);
      trip.emplace_back(b, a, 1.0);
    }
  }
  pattern_.resize(n, n);
  pattern_.setFromTriplets(trip.begin(), trip.end());
  pattern_.makeCompressed();

  auto slot = [&](Eigen::Index r, Eigen::Index c) -> Eigen::Index {
    const auto* begin = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[r];
    const auto* end = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[r + 1];
    return std::lower_bound(begin, end, c) - pattern_.innerIndexPtr();
  };
  diag_slot_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) diag_slot_[i] = slot(i, i);
  edge_slots_.reserve(structure_.edges.size());
  for (const auto& [u, v] : structure_.edges) {
    const auto a = index[u], b = index[v];
    std::array<Eigen::Index, 4> s{-1, -1, -1, -1};
    if (a >= 0) s[0] = diag_slot_[a];
    if (b >= 0) s[1] = diag_slot_[b];
    if (a >= 0 && b >= 0) {
      s[2] = slot(a, b);
      s[3] = slot(b, a);
    }
    edge_slots_.push_back(s);
  }
}

SpdOperator LaplacianMap::assemble(std::span<const double> weights) const {
  if (weights.size() != structure_.edges.size()) {
    throw Error(ErrorCode::StructureMismatch, "weight vector length " +
                                                  std::to_string(weights.size()) + " != edge count " +
                                                  std::to_string(structure_.edges.size()));
  }
  SparseMatrix m = pattern_;
  double* val = m.valuePtr();
  std::fill(val, val + m.nonZeros(), 0.0);
  for (auto d : diag_slot_) val[d] = gamma_;
  for (std::size_t e = 0; e < weights.size(); ++e) {
    const double w = weights[e];
    const auto& s = edge_slots_[e];
    if (s[0] >= 0) val[s[0]] += w;
    if (s[1] >= 0) val[s[1]] += w;
    if (s[2] >= 0) {
      val[s[2]] -= w;
      val[s[3]] -= w;
    }
  }
  return SpdOperator::sparse(std::move(m));
}

}  // namespace opaug
