#include <catch_amalgamated.hpp>

#include "opaug/graph.hpp"

using namespace opaug;

namespace {

/// Dense E W Eᵀ restricted to the interior, plus γI; built edge by edge.
Matrix dense_assembly(const IncidenceStructure& s, const ParameterVector& w, double gamma) {
  const auto nv = static_cast<Eigen::Index>(s.vertex_count);
  Matrix inc = Matrix::Zero(nv, static_cast<Eigen::Index>(s.edges.size()));
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    inc(static_cast<Eigen::Index>(s.edges[e].first), static_cast<Eigen::Index>(e)) = 1.0;
    inc(static_cast<Eigen::Index>(s.edges[e].second), static_cast<Eigen::Index>(e)) = -1.0;
  }
  const Matrix full = inc * Vector::Map(w.data(), static_cast<Eigen::Index>(w.size())).asDiagonal() * inc.transpose();
  const auto n = static_cast<Eigen::Index>(s.interior.size());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = full(static_cast<Eigen::Index>(s.interior[i]), static_cast<Eigen::Index>(s.interior[j]));
    }
  }
  return out + gamma * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("structure validation") {
  CHECK_THROWS_AS(IncidenceStructure::make(3, {{0, 0}}), Error);
  try {
    IncidenceStructure::make(3, {{1, 1}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SelfLoop);
  }
  CHECK_THROWS_AS(IncidenceStructure::make(3, {{0, 3}}), Error);
  CHECK_THROWS_AS(IncidenceStructure::make(3, {{0, 1}}, {1, 1}), Error);
  const auto s = IncidenceStructure::make(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, {4, 0});
  CHECK(s.boundary == std::vector<std::size_t>{0, 4});
  CHECK(s.interior == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("assembly matches the dense incidence product") {
  Rng rng = substream(77, 0);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t nv = 3 + t % 9;
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < nv; ++u) {
      for (std::size_t v = u + 1; v < nv; ++v) {
        if (unif(rng) < 0.8) edges.emplace_back(t % 2 ? u : v, t % 2 ? v : u);
      }
    }
    std::vector<std::size_t> boundary;
    if (t % 3 != 0) boundary.push_back(0);
    const double gamma = t % 3 == 0 ? 0.5 : 0.0;
    auto s = IncidenceStructure::make(nv, edges, boundary);
    LaplacianMap map(s, gamma);
    ParameterVector w(edges.size());
    for (auto& x : w) x = unif(rng);
    if (!w.empty()) w[0] = 0.0;  // explicit zero weight keeps the pattern
    const auto op = map.assemble(w);
    REQUIRE(op.is_sparse());
    CHECK((op.to_dense() - dense_assembly(s, w, gamma)).norm() < 1e-13);
    // second assembly on the same map reuses the pattern
    for (auto& x : w) x = 1.0;
    CHECK((map.assemble(w).to_dense() - dense_assembly(s, w, gamma)).norm() < 1e-13);
  }
}

TEST_CASE("assembly rejects wrong parameter length") {
  LaplacianMap map(IncidenceStructure::make(3, {{0, 1}, {1, 2}}, {0}), 0.0);
  const ParameterVector w{1.0};
  try {
    map.assemble(w);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StructureMismatch);
  }
}

TEST_CASE("map without interior is rejected") {
  CHECK_THROWS_AS(LaplacianMap(IncidenceStructure::make(2, {{0, 1}}, {0, 1}), 0.0), Error);
}
