#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opaug/augmentation.hpp"
#include "opaug/noise.hpp"

namespace opaug::oracle {

/// Dense exact moments over a DiscreteEnsemble, X̂ = I − α⁻¹A^{-1/2}ÂA^{-1/2}.
struct ExactMoments {
  Eigen::Index n = 0;
  Matrix inv_mean;          // E[Â⁻¹]
  Matrix inv_a_inv_mean;    // E[Â⁻¹AÂ⁻¹]
  std::vector<Matrix> x_powers;  // E[X̂^k], k = 0..k_max
};

constexpr Eigen::Index kMaxDim = 8;

ExactMoments exact_moments(const DiscreteEnsemble& ensemble, const Matrix& A, int k_max, double alpha = 1.0);

double exact_beta_energy(const DiscreteEnsemble& ensemble, const Matrix& A, const Matrix& L);

struct AgFactors {
  double beta_star = 0.0;
  double beta_lower = 0.0;  // β°
};
AgFactors exact_beta_ag(const DiscreteEnsemble& ensemble, const Matrix& A, const Matrix& R, const Matrix& B);

/// (1/‖b‖²) Var(bᵀÂ⁻¹b) / E[(bᵀÂ⁻¹b)²].
double exact_beta_basic(const DiscreteEnsemble& ensemble, const Vector& b);

/// max over outcomes of ‖A^{-1/2}ÂA^{-1/2}‖₂, floored at 1.
double ensemble_shift(const DiscreteEnsemble& ensemble, const Matrix& A);

/// Exact windowed β_N; SHIFTED uses kind.alpha.
double exact_truncated_factor(const DiscreteEnsemble& ensemble, const Matrix& A, const Matrix& L, int N,
                              const WindowKind& kind);

struct CheckReport {
  bool passed = false;
  bool precondition_ok = true;
  double margin = 0.0;
  std::string detail;
};

CheckReport check_loewner(const DiscreteEnsemble& ensemble, const Matrix& A);

using WeightedMatrix = std::pair<double, Matrix>;
CheckReport check_trace_inequality(std::span<const WeightedMatrix> samples, const Matrix& S, int j, int k, int r);

struct RatioReport : CheckReport {
  bool hypothesis_holds = false;
  std::vector<double> ratios;
};
/// Sequences are a₁, a₂, … (index 0 holds a₁).
RatioReport check_monotone_ratio(std::span<const double> a, std::span<const double> b);

struct NeumannReport : CheckReport {
  double rho = 0.0;
  double radius = 0.0;
  std::vector<double> residuals;  // index K
};
NeumannReport check_neumann_tail(const Matrix& X, const Matrix& Y, int K = 50);

struct ChainReport : CheckReport {
  std::vector<double> factors;  // β_1..β_Nmax
  double beta_star = 0.0;
};
/// β_1 ≤ … ≤ β_Nmax ≤ β* ≤ 1 and β_1 ≥ 0, each comparison at `tol`.
ChainReport check_chain(const DiscreteEnsemble& ensemble, const Matrix& A, const Matrix& L, int n_max,
                        const WindowKind& kind, double tol = 1e-10);

struct SuiteResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  std::size_t precondition_skips = 0;
  double worst_margin = 0.0;
  std::string first_failure;
};

struct SuiteSizes {
  std::size_t loewner = 200;
  std::size_t trace = 500;
  std::size_t ratio = 200;
  std::size_t neumann = 200;
  std::size_t soft_chain = 60;
  std::size_t shifted_chain = 60;
};

/// Randomized falsification suites for every lemma and both chain theorems.
std::vector<SuiteResult> run_lemma_suites(std::uint64_t seed, const SuiteSizes& sizes = {});

/// Named small cases for the CLI: text report.
std::vector<std::string> oracle_cases();
std::string run_oracle_case(const std::string& name);

/// Random SPD with eigenvalues in [lo, hi].
Matrix random_spd(Eigen::Index n, double lo, double hi, Rng& rng);
/// Ensemble Â = A^{1/2}(I − Xᵢ)A^{1/2} with E[X] = 0 and max‖Xᵢ‖ = radius.
DiscreteEnsemble random_mean_zero_ensemble(const Matrix& A, std::size_t outcomes, double radius, Rng& rng);
/// Ensemble Â = A^{1/2}YᵢA^{1/2}, E[Y] = I, Yᵢ ⪰ floor·I, unbounded above.
DiscreteEnsemble random_wide_ensemble(const Matrix& A, std::size_t outcomes, double floor, Rng& rng);

}  // namespace opaug::oracle
