#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opaug/linalg.hpp"
#include "opaug/noise.hpp"

namespace opaug {

enum class WindowTag { Soft, Hard, Shifted };

struct WindowKind {
  WindowTag tag = WindowTag::Soft;
  double alpha = 1.0;

  static WindowKind soft() { return {WindowTag::Soft, 1.0}; }
  static WindowKind hard() { return {WindowTag::Hard, 1.0}; }
  static WindowKind shifted(double alpha);
  double eta() const { return 1.0 - 1.0 / alpha; }
};

/// Numerator weight w_N(k).
double window(const WindowKind& kind, int N, int k);
/// Denominator weight w̄_N(k).
double window_bar(const WindowKind& kind, int N, int k);
/// Largest k with a nonzero weight.
int window_support(const WindowKind& kind, int N);

/// t_k = α^{-k} qᵀA⁻¹((αA − Â)A⁻¹)^k q for k = 0..n_max, with A = base, Â = sample.
std::vector<double> series_terms(const Factorization& base, const SpdOperator& sample, const Vector& q,
                                 int n_max, double alpha);

enum class Method { Basic, AG, EAG, TEAGSoft, TEAGHard, ASTEAG };
enum class ClampPolicy { AlgorithmDefault, None, NonNegative };

std::string method_name(Method m);
bool is_energy_method(Method m);

struct AugmentationSpec {
  Method method = Method::EAG;
  int order = 1;  // N
  std::size_t samples = 100;  // M
  std::optional<Matrix> R, B, C;  // unset means identity
  ClampPolicy clamp = ClampPolicy::AlgorithmDefault;
  double power_tol = 1e-6;
  int power_max_iter = 200;

  /// Throws InvalidSpec / InvalidOrder; checks commutators and semidefiniteness.
  void validate(Eigen::Index n) const;
  bool clamps() const;
  /// Probe covariance for the numerator stream: W = RB (AG) or L = CR (energy).
  ProbeCorrelation q_correlation(Eigen::Index n) const;
  /// AG denominator stream: BW.
  ProbeCorrelation p_correlation(Eigen::Index n) const;
};

struct AugmentationEstimate {
  double beta = 0.0;
  double raw_beta = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  double std_error = 0.0;  // delta method, Monte-Carlo batches only
  std::vector<double> partial_numerators;  // by power k, truncated methods
  std::vector<double> partial_denominators;
  std::vector<double> alphas;
  bool power_converged = true;
};

struct BootstrapDraw {
  double weight = 1.0;
  SpdOperator sample;
  std::vector<Vector> q;
  std::vector<Vector> p;
  std::uint64_t power_seed = 0;
};

struct BootstrapBatch {
  std::vector<BootstrapDraw> draws;
  bool exact = false;
};

using Sampler = std::function<SpdOperator(Rng&)>;

Sampler bootstrap_sampler(const MatrixFamily& family, const ParameterVector& omega_hat);

/// M i.i.d. draws, each with one q (and one p when `p_corr` is given).
BootstrapBatch draw_batch(const Sampler& sampler, std::size_t M, const ProbeCorrelation& q_corr,
                          const ProbeCorrelation* p_corr, Rng& rng);
/// Exact expectation: outcomes weighted by probability, probes = columns of the factors.
BootstrapBatch exact_batch(const DiscreteEnsemble& ensemble, const ProbeCorrelation& q_corr,
                           const ProbeCorrelation* p_corr);

/// A batch bound to the observed operator, with per-sample caches
/// (factorizations, series terms, shifts). Single-owner.
class PreparedBatch {
 public:
  PreparedBatch(SpdOperator observed, BootstrapBatch batch);

  const SpdOperator& observed() const { return observed_; }
  const Factorization& observed_factorization() const { return *observed_fact_; }
  const BootstrapBatch& batch() const { return batch_; }
  std::size_t size() const { return batch_.draws.size(); }

  const Factorization& sample_factorization(std::size_t i);
  /// Â⁻¹q for probe j of draw i.
  const Vector& observed_solve(std::size_t i, std::size_t j);
  /// Series at α = 1, at least up to n_max.
  const std::vector<double>& series(std::size_t i, std::size_t j, int n_max);
  /// Per-sample shift max(1, ‖Â^{-1/2}ÂᵦÂ^{-1/2}‖₂) by power method.
  double alpha(std::size_t i, double tol, int max_iter);
  bool alpha_converged(std::size_t i) const { return cache_[i].alpha_converged; }
  const std::vector<double>& shifted_series(std::size_t i, std::size_t j, int n_max, double tol,
                                            int max_iter);

 private:
  struct DrawCache {
    std::shared_ptr<const Factorization> fact;
    std::vector<Vector> solved_q;
    std::vector<std::vector<double>> series;
    std::vector<std::vector<double>> shifted;
    std::optional<double> alpha;
    bool alpha_converged = true;
  };
  SpdOperator observed_;
  std::shared_ptr<const Factorization> observed_fact_;
  BootstrapBatch batch_;
  std::vector<DrawCache> cache_;
};

AugmentationEstimate estimate_basic(PreparedBatch& batch, const Vector& b);
AugmentationEstimate estimate_ag(PreparedBatch& batch, const AugmentationSpec& spec);
AugmentationEstimate estimate_eag(PreparedBatch& batch, const AugmentationSpec& spec);
AugmentationEstimate estimate_teag(PreparedBatch& batch, const AugmentationSpec& spec);
AugmentationEstimate estimate_asteag(PreparedBatch& batch, const AugmentationSpec& spec);
/// Dispatch on spec.method; `b` is needed for BASIC only.
AugmentationEstimate estimate(PreparedBatch& batch, const AugmentationSpec& spec, const Vector* b = nullptr);

AugmentationEstimate estimate_beta_basic(const SpdOperator& observed, const ParameterVector& omega_hat,
                                         const MatrixFamily& family, const Vector& b, std::size_t M,
                                         Rng& rng);
AugmentationEstimate estimate_beta_ag(const SpdOperator& observed, const ParameterVector& omega_hat,
                                      const MatrixFamily& family, const AugmentationSpec& spec, Rng& rng);
AugmentationEstimate estimate_beta_eag(const SpdOperator& observed, const ParameterVector& omega_hat,
                                       const MatrixFamily& family, const AugmentationSpec& spec, Rng& rng);
AugmentationEstimate estimate_beta_teag(const SpdOperator& observed, const ParameterVector& omega_hat,
                                        const MatrixFamily& family, const AugmentationSpec& spec,
                                        WindowTag kind, Rng& rng);
AugmentationEstimate estimate_beta_asteag(const SpdOperator& observed, const ParameterVector& omega_hat,
                                          const MatrixFamily& family, const AugmentationSpec& spec,
                                          Rng& rng);

/// x̃ = (Â⁻¹ − βK̂) b.
Vector augmented_solve(const Factorization& observed_fact, const AugmentationSpec& spec, double beta,
                       const Vector& b);

/// Closed-form order-2 estimators written with Ẑ = Âᵦ − Â; a cross-check of the windowed path.
enum class Order2Form { SoftFull, HardFull, SoftMeanZero, HardMeanZero };
double order2_explicit(PreparedBatch& batch, Order2Form form);

}  // namespace opaug
