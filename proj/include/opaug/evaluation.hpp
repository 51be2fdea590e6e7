#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opaug/augmentation.hpp"
#include "opaug/problems.hpp"

namespace opaug {

struct RatioStat {
  double value = 0.0;
  double two_sigma = 0.0;
};

/// Σerr / Σref with a first-order delta-method 2σ half-width.
RatioStat ratio_of_means(std::span<const double> err, std::span<const double> ref);

/// A benchmark row selector. Empty `method` means the naive solve.
struct MethodSpec {
  std::optional<Method> method;
  int order = 0;  // report order: 2N for T-EAG, N for AST-EAG

  static MethodSpec naive() { return {}; }
  static MethodSpec of(Method m, int order = 0) { return {m, order}; }
  /// naive | basic | ag | eag | teag-s:K | teag-h:K | asteag:K
  static MethodSpec parse(std::string_view text);

  std::string tag() const;
  std::string display_name() const;
  std::string window_label() const;
  AugmentationSpec spec(std::size_t M, double power_tol, int power_max_iter) const;
  bool operator==(const MethodSpec&) const = default;
};

std::vector<MethodSpec> parse_methods(std::string_view list);
std::vector<MethodSpec> default_methods(bool with_truncated_taylor);

enum class ProblemKind { Poisson1D, Poisson2D, Graph, Sparsify };

std::string_view problem_name(ProblemKind kind);
ProblemKind parse_problem(std::string_view text);

struct BenchmarkConfig {
  ProblemKind problem = ProblemKind::Poisson1D;
  std::size_t n = 128;
  std::size_t nx = 32, ny = 32;
  std::filesystem::path edges;
  std::size_t boundary = 6;
  double gamma = 1.0;
  NoiseModel noise = NoiseModel::two_point(0.5, 1.5);
  std::vector<MethodSpec> methods;
  std::size_t trials = 5000;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double power_tol = 1e-6;
  int power_max_iter = 200;
};

ProblemInstance build_problem(const BenchmarkConfig& config);

struct MethodTrial {
  double l2_err = 0.0;
  double energy_err = 0.0;
  double beta = 0.0;
  double seconds = 0.0;
};

struct TrialResult {
  double l2_ref = 0.0;
  double energy_ref = 0.0;
  std::vector<MethodTrial> methods;
};

struct TrialOptions {
  double power_tol = 1e-6;
  int power_max_iter = 200;
};

/// One paired draw of (Â, b) shared by every method.
TrialResult run_trial(const ProblemInstance& instance, std::span<const MethodSpec> methods, std::size_t M,
                      Rng& rng, const TrialOptions& options = {});

struct ReportRow {
  MethodSpec method;
  double r_mse = 0.0, r_mse_2sigma = 0.0;
  double r_emse = 0.0, r_emse_2sigma = 0.0;
  double seconds = 0.0;
  double mean_beta = 0.0;
};

struct BenchmarkReport {
  std::vector<ReportRow> rows;
  std::string problem;
  std::string noise;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t samples = 0;

  const ReportRow& row(const MethodSpec& m) const;
};

BenchmarkReport aggregate(std::span<const TrialResult> trials, std::span<const MethodSpec> methods);

BenchmarkReport run_benchmark(const BenchmarkConfig& config);

std::string to_csv(const BenchmarkReport& report, bool timing = false);
std::string to_markdown(const BenchmarkReport& report);

/// Write via a sibling temp file and rename.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace opaug
