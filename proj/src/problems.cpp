#include "opaug/problems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

namespace opaug {

ProblemInstance make_instance(std::string name, IncidenceStructure structure, ParameterVector omega,
                              double gamma, NoiseModel noise, double rhs_sign) {
  auto map = std::make_shared<const LaplacianMap>(std::move(structure), gamma);
  MatrixFamily family(noise, map);
  SpdOperator truth = family.assemble(omega);
  truth.factorization();
  return ProblemInstance{std::move(name), std::move(omega), std::move(family), std::move(truth), rhs_sign};
}

ProblemInstance build_grid_1d(std::size_t n_interior, NoiseModel noise) {
  if (n_interior < 1) throw Error(ErrorCode::InvalidSize, "n_interior must be >= 1");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i <= n_interior; ++i) edges.emplace_back(i, i + 1);
  auto s = IncidenceStructure::make(n_interior + 2, std::move(edges), {0, n_interior + 1});
  ParameterVector omega(s.edge_count(), 1.0);
  return make_instance(fmt::format("poisson1d n={}", n_interior), std::move(s), std::move(omega), 0.0,
                       noise, -1.0);
}

ProblemInstance build_grid_2d(std::size_t nx, std::size_t ny, NoiseModel noise) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidSize, "nx, ny must be >= 1");
  const std::size_t w = nx + 2, h = ny + 2;
  auto id = [w](std::size_t x, std::size_t y) { return y * w + x; };
  auto inside = [&](std::size_t x, std::size_t y) { return x >= 1 && x <= nx && y >= 1 && y <= ny; };
  std::vector<Edge> edges;
  std::vector<std::size_t> boundary;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (!inside(x, y)) boundary.push_back(id(x, y));
      if (x + 1 < w && (inside(x, y) || inside(x + 1, y))) edges.emplace_back(id(x, y), id(x + 1, y));
      if (y + 1 < h && (inside(x, y) || inside(x, y + 1))) edges.emplace_back(id(x, y), id(x, y + 1));
    }
  }
  auto s = IncidenceStructure::make(w * h, std::move(edges), std::move(boundary));
  ParameterVector omega(s.edge_count(), 1.0);
  return make_instance(fmt::format("poisson2d {}x{}", nx, ny), std::move(s), std::move(omega), 0.0, noise,
                       -1.0);
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
  while (i < line.size()) {
    while (i < line.size() && sep(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !sep(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

EdgeList parse_edge_list(std::istream& in) {
  struct Raw {
    std::uint64_t u, v;
    double w;
  };
  std::vector<Raw> raw;
  std::string line;
  std::size_t lineno = 0;
  std::uint64_t min_id = std::numeric_limits<std::uint64_t>::max(), max_id = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%' || line[first] == '#') continue;
    const auto fields = split_fields(line);
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::ParseError, fmt::format("line {}: {}", lineno, why));
    };
    if (fields.size() < 2 || fields.size() > 3) fail("expected 'u v [w]'");
    std::uint64_t ids[2];
    for (int k = 0; k < 2; ++k) {
      auto f = fields[k];
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), ids[k]);
      if (ec != std::errc() || p != f.data() + f.size()) fail(fmt::format("bad vertex id '{}'", f));
    }
    double w = 1.0;
    if (fields.size() == 3) {
      auto f = fields[2];
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), w);
      if (ec != std::errc() || p != f.data() + f.size()) fail(fmt::format("bad weight '{}'", f));
      if (!std::isfinite(w) || w <= 0.0) fail(fmt::format("weight must be positive, got '{}'", f));
    }
    if (ids[0] == ids[1]) throw Error(ErrorCode::SelfLoop, fmt::format("line {}: vertex {}", lineno, ids[0]));
    min_id = std::min({min_id, ids[0], ids[1]});
    max_id = std::max({max_id, ids[0], ids[1]});
    raw.push_back({ids[0], ids[1], w});
  }
  if (raw.empty()) throw Error(ErrorCode::EmptyGraph, "no edges");
  const std::uint64_t shift = min_id == 0 ? 0 : 1;
  std::map<Edge, std::size_t> seen;
  std::vector<Edge> edges;
  ParameterVector weights;
  for (const auto& r : raw) {
    Edge e{static_cast<std::size_t>(r.u - shift), static_cast<std::size_t>(r.v - shift)};
    const Edge key{std::min(e.first, e.second), std::max(e.first, e.second)};
    auto [it, fresh] = seen.try_emplace(key, edges.size());
    if (fresh) {
      edges.push_back(e);
      weights.push_back(r.w);
    } else {
      weights[it->second] += r.w;
    }
  }
  return {IncidenceStructure::make(static_cast<std::size_t>(max_id - shift + 1), std::move(edges)),
          std::move(weights)};
}

EdgeList load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, fmt::format("cannot open '{}'", path.string()));
  return parse_edge_list(in);
}

IncidenceStructure select_boundary(const IncidenceStructure& structure, std::size_t count,
                                   std::uint64_t seed) {
  const std::size_t n = structure.vertex_count;
  if (count >= n) throw Error(ErrorCode::InvalidSize, "boundary count must be < vertex count");
  if (count == 0) return IncidenceStructure::make(n, structure.edges);
  const ParameterVector ones(structure.edge_count(), 1.0);
  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    Rng rng = substream(seed, attempt);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(perm[i], perm[pick(rng)]);
    }
    perm.resize(count);
    auto candidate = IncidenceStructure::make(n, structure.edges, perm);
    try {
      LaplacianMap(candidate, 0.0).assemble(ones).factorization();
      return candidate;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotPositiveDefinite) throw;
    }
  }
  throw Error(ErrorCode::CannotStabilize, "no SPD interior minor in 100 draws");
}

ProblemInstance shifted_instance(const IncidenceStructure& structure, ParameterVector omega,
                                 double gamma, NoiseModel noise) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidShift, "gamma must be > 0 without a boundary");
  auto s = IncidenceStructure::make(structure.vertex_count, structure.edges);
  return make_instance(fmt::format("sparsify gamma={}", gamma), std::move(s), std::move(omega), gamma,
                       noise, 1.0);
}

}  // namespace opaug
