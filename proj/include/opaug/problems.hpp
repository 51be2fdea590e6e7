#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <string>

#include "opaug/graph.hpp"
#include "opaug/noise.hpp"

namespace opaug {

struct ProblemInstance {
  std::string name;
  ParameterVector omega_true;
  MatrixFamily family;
  SpdOperator truth;  // A = ℳ(ω*)
  double rhs_sign = 1.0;  // Poisson problems solve the negated system

  const IncidenceStructure& structure() const { return family.map().structure(); }
  double gamma() const { return family.map().gamma(); }
  Eigen::Index dim() const { return truth.dim(); }
};

/// Builds the instance and checks the ground truth factorizes.
ProblemInstance make_instance(std::string name, IncidenceStructure structure, ParameterVector omega,
                              double gamma, NoiseModel noise, double rhs_sign = 1.0);

ProblemInstance build_grid_1d(std::size_t n_interior,
                              NoiseModel noise = NoiseModel::two_point(0.5, 1.5));
ProblemInstance build_grid_2d(std::size_t nx, std::size_t ny,
                              NoiseModel noise = NoiseModel::two_point(0.5, 1.5));

struct EdgeList {
  IncidenceStructure structure;  // no boundary yet
  ParameterVector weights;
};

EdgeList parse_edge_list(std::istream& in);
EdgeList load_edge_list(const std::filesystem::path& path);

/// Seeded uniform draw of `count` boundary vertices whose unit-weight minor is SPD.
IncidenceStructure select_boundary(const IncidenceStructure& structure, std::size_t count,
                                   std::uint64_t seed);

/// L + γI on every vertex; any boundary in `structure` is ignored.
ProblemInstance shifted_instance(const IncidenceStructure& structure, ParameterVector omega,
                                 double gamma, NoiseModel noise);

}  // namespace opaug
