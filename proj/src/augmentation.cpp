#include "opaug/augmentation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace opaug {

WindowKind WindowKind::shifted(double alpha) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidShift, fmt::format("shift alpha must be >= 1, got {}", alpha));
  }
  return {WindowTag::Shifted, alpha};
}

namespace {

void check_window_args(const WindowKind& kind, int N, int k) {
  if (N < 1) throw Error(ErrorCode::InvalidOrder, fmt::format("order N must be >= 1, got {}", N));
  if (k < 0) throw Error(ErrorCode::InvalidOrder, "power k must be >= 0");
  if (kind.tag == WindowTag::Shifted && !(kind.alpha >= 1.0)) {
    throw Error(ErrorCode::InvalidShift, "shift alpha must be >= 1");
  }
}

}  // namespace

double window(const WindowKind& kind, int N, int k) {
  check_window_args(kind, N, k);
  switch (kind.tag) {
    case WindowTag::Soft:
      if (k < 2 * N) return k;
      return k == 2 * N ? 0.5 * (k - 1) : 0.0;
    case WindowTag::Hard: return k <= 2 * N ? k : 0.0;
    case WindowTag::Shifted: {
      if (k > N) return 0.0;
      const double eta = kind.eta();
      return (k + 1) - (1.0 - std::pow(eta, N - k + 1)) * kind.alpha;
    }
  }
  return 0.0;
}

double window_bar(const WindowKind& kind, int N, int k) {
  check_window_args(kind, N, k);
  switch (kind.tag) {
    case WindowTag::Soft:
      if (k < 2 * N) return k + 1;
      return k == 2 * N ? 0.5 * k : 0.0;
    case WindowTag::Hard: return k <= 2 * N ? k + 1 : 0.0;
    case WindowTag::Shifted: return k <= N ? k + 1 : 0.0;
  }
  return 0.0;
}

int window_support(const WindowKind& kind, int N) {
  check_window_args(kind, N, 0);
  return kind.tag == WindowTag::Shifted ? N : 2 * N;
}

std::vector<double> series_terms(const Factorization& base, const SpdOperator& sample, const Vector& q,
                                 int n_max, double alpha) {
  if (sample.dim() != base.dim() || q.size() != base.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "series_terms operands");
  }
  if (!(alpha >= 1.0)) throw Error(ErrorCode::InvalidShift, "series_terms needs alpha >= 1");
  if (n_max < 0) throw Error(ErrorCode::InvalidOrder, "n_max must be >= 0");
  std::vector<double> t;
  t.reserve(n_max + 1);
  Vector v = base.solve(q);
  t.push_back(q.dot(v));
  for (int k = 1; k <= n_max; ++k) {
    v -= base.solve(sample.apply(v)) / alpha;
    t.push_back(q.dot(v));
  }
  for (double x : t) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "series term overflow");
  }
  return t;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Basic: return "BASIC";
    case Method::AG: return "AG";
    case Method::EAG: return "EAG";
    case Method::TEAGSoft: return "T-EAG-S";
    case Method::TEAGHard: return "T-EAG-H";
    case Method::ASTEAG: return "AST-EAG";
  }
  return "?";
}

bool is_energy_method(Method m) {
  return m == Method::EAG || m == Method::TEAGSoft || m == Method::TEAGHard || m == Method::ASTEAG;
}

namespace {

void check_psd(const Matrix& m, Eigen::Index n, const char* name) {
  if (m.rows() != n || m.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, fmt::format("{} must be {}x{}", name, n, n));
  }
  const double scale = std::max(1.0, m.norm());
  if ((m - m.transpose()).norm() > 1e-12 * scale) {
    throw Error(ErrorCode::InvalidSpec, fmt::format("{} is not symmetric", name));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw Error(ErrorCode::InvalidSpec, fmt::format("{} is not positive semidefinite", name));
  }
}

Matrix or_identity(const std::optional<Matrix>& m, Eigen::Index n) {
  return m ? *m : Matrix(Matrix::Identity(n, n));
}

}  // namespace

void AugmentationSpec::validate(Eigen::Index n) const {
  const bool truncated = method == Method::TEAGSoft || method == Method::TEAGHard || method == Method::ASTEAG;
  if (truncated && order < 1) throw Error(ErrorCode::InvalidOrder, fmt::format("order must be >= 1, got {}", order));
  if (samples < (method == Method::Basic ? 2u : 1u)) throw Error(ErrorCode::InvalidSpec, "too few bootstrap samples");
  if (!(power_tol > 0.0) || power_max_iter < 1) throw Error(ErrorCode::InvalidSpec, "power method settings");
  if (R) check_psd(*R, n, "R");
  if (B) check_psd(*B, n, "B");
  if (C) check_psd(*C, n, "C");
  const Matrix r = or_identity(R, n);
  auto commutes = [&](const std::optional<Matrix>& m, const char* name) {
    if (!m) return;
    if ((r * *m - *m * r).norm() > 1e-10) {
      throw Error(ErrorCode::InvalidSpec, fmt::format("R and {} do not commute", name));
    }
  };
  commutes(B, "B");
  commutes(C, "C");
}

bool AugmentationSpec::clamps() const {
  switch (clamp) {
    case ClampPolicy::None: return false;
    case ClampPolicy::NonNegative: return true;
    case ClampPolicy::AlgorithmDefault: return method != Method::AG;
  }
  return true;
}

ProbeCorrelation AugmentationSpec::q_correlation(Eigen::Index n) const {
  if (method == Method::AG) {
    if (!R && !B) return ProbeCorrelation::identity(n);
    return ProbeCorrelation::from_matrix(or_identity(R, n) * or_identity(B, n));
  }
  if (!R && !C) return ProbeCorrelation::identity(n);
  return ProbeCorrelation::from_matrix(or_identity(C, n) * or_identity(R, n));
}

ProbeCorrelation AugmentationSpec::p_correlation(Eigen::Index n) const {
  if (!R && !B) return ProbeCorrelation::identity(n);
  const Matrix b = or_identity(B, n);
  return ProbeCorrelation::from_matrix(b * or_identity(R, n) * b);
}

Sampler bootstrap_sampler(const MatrixFamily& family, const ParameterVector& omega_hat) {
  return [family, omega_hat](Rng& rng) { return bootstrap_sample(family, omega_hat, rng); };
}

BootstrapBatch draw_batch(const Sampler& sampler, std::size_t M, const ProbeCorrelation& q_corr,
                          const ProbeCorrelation* p_corr, Rng& rng) {
  BootstrapBatch out;
  out.draws.reserve(M);
  for (std::size_t i = 0; i < M; ++i) {
    BootstrapDraw d{1.0, sampler(rng), {}, {}, 0};
    d.q.push_back(q_corr.sample(rng));
    if (p_corr) d.p.push_back(p_corr->sample(rng));
    d.power_seed = rng();
    out.draws.push_back(std::move(d));
  }
  return out;
}

BootstrapBatch exact_batch(const DiscreteEnsemble& ensemble, const ProbeCorrelation& q_corr,
                           const ProbeCorrelation* p_corr) {
  auto columns = [](const Matrix& f) {
    std::vector<Vector> cols;
    for (Eigen::Index j = 0; j < f.cols(); ++j) cols.emplace_back(f.col(j));
    return cols;
  };
  const auto fq = columns(q_corr.factor());
  const auto fp = p_corr ? columns(p_corr->factor()) : std::vector<Vector>{};
  BootstrapBatch out;
  out.exact = true;
  std::uint64_t seed = 0;
  for (const auto& o : ensemble.outcomes()) out.draws.push_back({o.probability, o.op, fq, fp, ++seed});
  return out;
}

PreparedBatch::PreparedBatch(SpdOperator observed, BootstrapBatch batch)
    : observed_(std::move(observed)), batch_(std::move(batch)) {
  observed_fact_ = observed_.factorization();
  for (const auto& d : batch_.draws) {
    if (d.sample.dim() != observed_.dim()) throw Error(ErrorCode::DimensionMismatch, "bootstrap sample dimension");
  }
  cache_.resize(batch_.draws.size());
}

const Factorization& PreparedBatch::sample_factorization(std::size_t i) {
  auto& c = cache_[i];
  if (!c.fact) {
    try {
      c.fact = std::make_shared<const Factorization>(batch_.draws[i].sample);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotPositiveDefinite) throw;
      throw Error(ErrorCode::NotPositiveDefinite, fmt::format("bootstrap sample {}", i));
    }
  }
  return *c.fact;
}

const Vector& PreparedBatch::observed_solve(std::size_t i, std::size_t j) {
  auto& c = cache_[i];
  const auto& q = batch_.draws[i].q;
  if (c.solved_q.empty()) {
    c.solved_q.reserve(q.size());
    for (const auto& v : q) c.solved_q.push_back(observed_fact_->solve(v));
  }
  return c.solved_q[j];
}

const std::vector<double>& PreparedBatch::series(std::size_t i, std::size_t j, int n_max) {
  auto& c = cache_[i];
  if (c.series.empty()) c.series.resize(batch_.draws[i].q.size());
  auto& s = c.series[j];
  if (static_cast<int>(s.size()) <= n_max) {
    s = series_terms(*observed_fact_, batch_.draws[i].sample, batch_.draws[i].q[j], n_max, 1.0);
  }
  return s;
}

double PreparedBatch::alpha(std::size_t i, double tol, int max_iter) {
  auto& c = cache_[i];
  if (!c.alpha) {
    Rng rng(batch_.draws[i].power_seed);
    const auto r = generalized_spectral_norm(batch_.draws[i].sample, *observed_fact_, tol, max_iter, rng);
    c.alpha = std::max(1.0, r.value);
    c.alpha_converged = r.converged;
  }
  return *c.alpha;
}

const std::vector<double>& PreparedBatch::shifted_series(std::size_t i, std::size_t j, int n_max, double tol,
                                                         int max_iter) {
  const double a = alpha(i, tol, max_iter);
  auto& c = cache_[i];
  if (c.shifted.empty()) c.shifted.resize(batch_.draws[i].q.size());
  auto& s = c.shifted[j];
  if (static_cast<int>(s.size()) <= n_max) {
    s = series_terms(*observed_fact_, batch_.draws[i].sample, batch_.draws[i].q[j], n_max, a);
  }
  return s;
}

namespace {

// Σ wᵢaᵢ / Σ wᵢbᵢ with a delta-method standard error for i.i.d. batches.
class RatioSum {
 public:
  void add(double weight, double a, double b) {
    w_.push_back(weight);
    a_.push_back(a);
    b_.push_back(b);
  }

  void finish(AugmentationEstimate& est, bool exact) const {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i) {
      num += w_[i] * a_[i];
      den += w_[i] * b_[i];
    }
    if (!std::isfinite(num) || !std::isfinite(den)) throw Error(ErrorCode::NonFinite, "estimator sums");
    if (den == 0.0) throw Error(ErrorCode::DegenerateDenominator, "estimator denominator is zero");
    est.numerator = num;
    est.denominator = den;
    est.raw_beta = num / den;
    const std::size_t m = w_.size();
    if (!exact && m >= 2) {
      const double mean_b = den / m;
      double ss = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double r = a_[i] - est.raw_beta * b_[i];
        ss += r * r;
      }
      est.std_error = std::sqrt(ss / (m * (m - 1.0))) / std::abs(mean_b);
    }
  }

 private:
  std::vector<double> w_, a_, b_;
};

void apply_clamp(AugmentationEstimate& est, const AugmentationSpec& spec) {
  est.beta = spec.clamps() ? std::max(0.0, est.raw_beta) : est.raw_beta;
}

Vector times(const std::optional<Matrix>& m, const Vector& x) { return m ? Vector(*m * x) : x; }

}  // namespace

AugmentationEstimate estimate_basic(PreparedBatch& batch, const Vector& b) {
  const double bb = b.squaredNorm();
  if (bb == 0.0) throw Error(ErrorCode::InvalidSpec, "BASIC needs b != 0");
  if (b.size() != batch.observed().dim()) throw Error(ErrorCode::DimensionMismatch, "BASIC rhs length");
  double wsum = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double w = batch.batch().draws[i].weight;
    const double s = b.dot(batch.sample_factorization(i).solve(b));
    wsum += w;
    m1 += w * s;
    m2 += w * s * s;
  }
  m1 /= wsum;
  m2 /= wsum;
  if (!(m2 > 0.0)) throw Error(ErrorCode::DegenerateDenominator, "bootstrap quadratic forms all zero");
  AugmentationEstimate est;
  est.numerator = std::max(0.0, m2 - m1 * m1);
  est.denominator = m2 * bb;
  est.raw_beta = (m2 - m1 * m1) / est.denominator;
  est.beta = std::clamp(est.raw_beta, 0.0, 1.0 / bb);
  return est;
}

AugmentationEstimate estimate_ag(PreparedBatch& batch, const AugmentationSpec& spec) {
  const auto& draws = batch.batch().draws;
  RatioSum sum;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& fact = batch.sample_factorization(i);
    double a = 0.0, bden = 0.0;
    for (std::size_t j = 0; j < draws[i].q.size(); ++j) {
      const Vector x = fact.solve(draws[i].q[j]);
      const Vector wx = times(spec.R, times(spec.B, x));
      a += wx.dot(x) - wx.dot(batch.observed_solve(i, j));
    }
    if (draws[i].p.empty()) throw Error(ErrorCode::InvalidSpec, "AG needs a p probe stream");
    for (const auto& p : draws[i].p) {
      const Vector y = fact.solve(p);
      bden += y.dot(times(spec.R, times(spec.R, times(spec.B, y))));
    }
    sum.add(draws[i].weight, a, bden);
  }
  AugmentationEstimate est;
  sum.finish(est, batch.batch().exact);
  apply_clamp(est, spec);
  return est;
}

AugmentationEstimate estimate_eag(PreparedBatch& batch, const AugmentationSpec& spec) {
  const auto& draws = batch.batch().draws;
  RatioSum sum;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& fact = batch.sample_factorization(i);
    double a = 0.0, bden = 0.0;
    for (const auto& q : draws[i].q) {
      const Vector x = fact.solve(q);
      const double energy = x.dot(batch.observed().apply(x));
      a += energy - q.dot(x);
      bden += energy;
    }
    sum.add(draws[i].weight, a, bden);
  }
  AugmentationEstimate est;
  sum.finish(est, batch.batch().exact);
  apply_clamp(est, spec);
  return est;
}

namespace {

AugmentationEstimate windowed(PreparedBatch& batch, const AugmentationSpec& spec, bool accelerated) {
  const int N = spec.order;
  const auto& draws = batch.batch().draws;
  WindowKind base_kind = spec.method == Method::TEAGHard ? WindowKind::hard() : WindowKind::soft();
  const int kmax = accelerated ? N : window_support(base_kind, N);
  AugmentationEstimate est;
  est.partial_numerators.assign(kmax + 1, 0.0);
  est.partial_denominators.assign(kmax + 1, 0.0);
  RatioSum sum;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    WindowKind kind = base_kind;
    double scale = 1.0;
    if (accelerated) {
      const double a = batch.alpha(i, spec.power_tol, spec.power_max_iter);
      kind = WindowKind::shifted(a);
      scale = 1.0 / (a * a);
      est.alphas.push_back(a);
      est.power_converged = est.power_converged && batch.alpha_converged(i);
    }
    std::vector<double> w(kmax + 1), wbar(kmax + 1);
    for (int k = 0; k <= kmax; ++k) {
      w[k] = scale * window(kind, N, k);
      wbar[k] = scale * window_bar(kind, N, k);
    }
    double a = 0.0, bden = 0.0;
    for (std::size_t j = 0; j < draws[i].q.size(); ++j) {
      const auto& t = accelerated ? batch.shifted_series(i, j, kmax, spec.power_tol, spec.power_max_iter)
                                  : batch.series(i, j, kmax);
      for (int k = 0; k <= kmax; ++k) {
        a += w[k] * t[k];
        bden += wbar[k] * t[k];
        est.partial_numerators[k] += draws[i].weight * w[k] * t[k];
        est.partial_denominators[k] += draws[i].weight * wbar[k] * t[k];
      }
    }
    sum.add(draws[i].weight, a, bden);
  }
  sum.finish(est, batch.batch().exact);
  apply_clamp(est, spec);
  return est;
}

}  // namespace

AugmentationEstimate estimate_teag(PreparedBatch& batch, const AugmentationSpec& spec) {
  if (spec.order < 1) throw Error(ErrorCode::InvalidOrder, "order must be >= 1");
  return windowed(batch, spec, false);
}

AugmentationEstimate estimate_asteag(PreparedBatch& batch, const AugmentationSpec& spec) {
  if (spec.order < 1) throw Error(ErrorCode::InvalidOrder, "order must be >= 1");
  return windowed(batch, spec, true);
}

AugmentationEstimate estimate(PreparedBatch& batch, const AugmentationSpec& spec, const Vector* b) {
  switch (spec.method) {
    case Method::Basic:
      if (!b) throw Error(ErrorCode::InvalidSpec, "BASIC needs the right-hand side");
      return estimate_basic(batch, *b);
    case Method::AG: return estimate_ag(batch, spec);
    case Method::EAG: return estimate_eag(batch, spec);
    case Method::TEAGSoft:
    case Method::TEAGHard: return estimate_teag(batch, spec);
    case Method::ASTEAG: return estimate_asteag(batch, spec);
  }
  throw Error(ErrorCode::InvalidSpec, "unknown method");
}

namespace {

AugmentationEstimate run_wrapped(const SpdOperator& observed, const ParameterVector& omega_hat,
                                 const MatrixFamily& family, const AugmentationSpec& spec, Rng& rng) {
  const auto n = observed.dim();
  spec.validate(n);
  const auto q = spec.q_correlation(n);
  std::optional<ProbeCorrelation> p;
  if (spec.method == Method::AG) p = spec.p_correlation(n);
  auto batch = draw_batch(bootstrap_sampler(family, omega_hat), spec.samples, q, p ? &*p : nullptr, rng);
  PreparedBatch prepared(observed, std::move(batch));
  return estimate(prepared, spec);
}

AugmentationSpec with_method(AugmentationSpec spec, Method m) {
  spec.method = m;
  return spec;
}

}  // namespace

AugmentationEstimate estimate_beta_basic(const SpdOperator& observed, const ParameterVector& omega_hat,
                                         const MatrixFamily& family, const Vector& b, std::size_t M,
                                         Rng& rng) {
  if (M < 2) throw Error(ErrorCode::InvalidSpec, "BASIC needs M >= 2");
  auto batch = draw_batch(bootstrap_sampler(family, omega_hat), M, ProbeCorrelation::identity(observed.dim()),
                          nullptr, rng);
  PreparedBatch prepared(observed, std::move(batch));
  return estimate_basic(prepared, b);
}

AugmentationEstimate estimate_beta_ag(const SpdOperator& observed, const ParameterVector& omega_hat,
                                      const MatrixFamily& family, const AugmentationSpec& spec, Rng& rng) {
  return run_wrapped(observed, omega_hat, family, with_method(spec, Method::AG), rng);
}

AugmentationEstimate estimate_beta_eag(const SpdOperator& observed, const ParameterVector& omega_hat,
                                       const MatrixFamily& family, const AugmentationSpec& spec, Rng& rng) {
  return run_wrapped(observed, omega_hat, family, with_method(spec, Method::EAG), rng);
}

AugmentationEstimate estimate_beta_teag(const SpdOperator& observed, const ParameterVector& omega_hat,
                                        const MatrixFamily& family, const AugmentationSpec& spec,
                                        WindowTag kind, Rng& rng) {
  if (kind == WindowTag::Shifted) throw Error(ErrorCode::InvalidSpec, "T-EAG takes a soft or hard window");
  const auto m = kind == WindowTag::Hard ? Method::TEAGHard : Method::TEAGSoft;
  return run_wrapped(observed, omega_hat, family, with_method(spec, m), rng);
}

AugmentationEstimate estimate_beta_asteag(const SpdOperator& observed, const ParameterVector& omega_hat,
                                          const MatrixFamily& family, const AugmentationSpec& spec,
                                          Rng& rng) {
  return run_wrapped(observed, omega_hat, family, with_method(spec, Method::ASTEAG), rng);
}

Vector augmented_solve(const Factorization& observed_fact, const AugmentationSpec& spec, double beta,
                       const Vector& b) {
  if (!std::isfinite(beta)) throw Error(ErrorCode::NonFinite, "beta");
  if (b.size() != observed_fact.dim()) throw Error(ErrorCode::DimensionMismatch, "augmented_solve rhs");
  const Vector x = observed_fact.solve(b);
  if (beta == 0.0) return x;
  switch (spec.method) {
    case Method::Basic: return x - beta * b * b.dot(x);
    case Method::AG: return x - beta * times(spec.R, observed_fact.solve(times(spec.B, b)));
    default:
      if (!spec.C) return (1.0 - beta) * x;
      return x - beta * observed_fact.solve(*spec.C * b);
  }
}

double order2_explicit(PreparedBatch& batch, Order2Form form) {
  // y = Â⁻¹q, Ẑy = Âᵦy − q, s0 = qᵀy, s1 = yᵀẐy, s2 = (Ẑy)ᵀÂ⁻¹(Ẑy).
  const auto& draws = batch.batch().draws;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (std::size_t j = 0; j < draws[i].q.size(); ++j) {
      const Vector& q = draws[i].q[j];
      const Vector& y = batch.observed_solve(i, j);
      const Vector zy = draws[i].sample.apply(y) - q;
      const double s0 = q.dot(y);
      const double s1 = y.dot(zy);
      const double s2 = zy.dot(batch.observed_factorization().solve(zy));
      const double w = draws[i].weight;
      switch (form) {
        case Order2Form::SoftFull:
          num += w * (0.5 * s2 - s1);
          den += w * (s2 - 2.0 * s1 + s0);
          break;
        case Order2Form::HardFull:
          num += w * (2.0 * s2 - s1);
          den += w * (3.0 * s2 - 2.0 * s1 + s0);
          break;
        case Order2Form::SoftMeanZero:
          num += w * 0.5 * s2;
          den += w * (s2 + s0);
          break;
        case Order2Form::HardMeanZero:
          num += w * 2.0 * s2;
          den += w * (3.0 * s2 + s0);
          break;
      }
    }
  }
  if (den == 0.0) throw Error(ErrorCode::DegenerateDenominator, "order-2 denominator");
  return num / den;
}

}  // namespace opaug
