#include "opaug/linalg.hpp"

#include <cmath>
#include <mutex>

namespace opaug {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::StructureMismatch: return "StructureMismatch";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::InvalidShift: return "InvalidShift";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidSize: return "InvalidSize";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::CannotStabilize: return "CannotStabilize";
    case ErrorCode::InsufficientTrials: return "InsufficientTrials";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

struct SpdOperator::Cache {
  std::once_flag once;
  std::shared_ptr<const Factorization> fact;
};

namespace {

constexpr double kSymTol = 1e-12;

void check_symmetric(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "operator must be square and nonempty");
  }
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "operator has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymTol * scale) {
    throw Error(ErrorCode::InvalidSpec, "operator is not symmetric");
  }
}

void check_symmetric(const SparseMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "operator must be square and nonempty");
  }
  double scale = 1.0;
  for (Eigen::Index i = 0; i < m.nonZeros(); ++i) {
    const double v = m.valuePtr()[i];
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "operator has non-finite entries");
    scale = std::max(scale, std::abs(v));
  }
  const SparseMatrix diff = m - SparseMatrix(m.transpose());
  for (Eigen::Index i = 0; i < diff.nonZeros(); ++i) {
    if (std::abs(diff.valuePtr()[i]) > kSymTol * scale) {
      throw Error(ErrorCode::InvalidSpec, "operator is not symmetric");
    }
  }
}

}  // namespace

SpdOperator SpdOperator::dense(Matrix m) {
  check_symmetric(m);
  SpdOperator op{std::variant<Matrix, SparseMatrix>(std::move(m))};
  op.cache_ = std::make_shared<Cache>();
  return op;
}

SpdOperator SpdOperator::sparse(SparseMatrix m) {
  check_symmetric(m);
  m.makeCompressed();
  SpdOperator op{std::variant<Matrix, SparseMatrix>(std::move(m))};
  op.cache_ = std::make_shared<Cache>();
  return op;
}

SpdOperator SpdOperator::identity(Eigen::Index n) { return dense(Matrix::Identity(n, n)); }

SpdOperator SpdOperator::scalar(double value) { return dense(Matrix::Constant(1, 1, value)); }

Eigen::Index SpdOperator::dim() const {
  return std::visit([](const auto& m) { return static_cast<Eigen::Index>(m.rows()); }, storage_);
}

Vector SpdOperator::apply(const Vector& x) const {
  if (x.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "apply: vector length");
  return std::visit([&](const auto& m) -> Vector { return m * x; }, storage_);
}

Matrix SpdOperator::to_dense() const {
  return std::visit([](const auto& m) -> Matrix { return Matrix(m); }, storage_);
}

std::shared_ptr<const Factorization> SpdOperator::factorization() const {
  std::call_once(cache_->once, [&] { cache_->fact = std::make_shared<Factorization>(*this); });
  return cache_->fact;
}

struct Factorization::Impl {
  std::variant<Eigen::LLT<Matrix>, Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> solver;
};

namespace {

// Pivots must be positive relative to the largest diagonal entry; an exactly singular
// Laplacian minor otherwise slips through with a rounding-level pivot.
constexpr double kPivotTol = 1e-13;

void check_pivots(const Vector& pivots, double max_diag) {
  if (!pivots.allFinite() || (pivots.array() <= kPivotTol * max_diag).any()) {
    throw Error(ErrorCode::NotPositiveDefinite, "Cholesky hit a non-positive pivot");
  }
}

}  // namespace

Factorization::Factorization(const SpdOperator& op) : n_(op.dim()) {
  auto impl = std::make_shared<Impl>();
  if (const auto* s = op.sparse_matrix()) {
    auto& ldlt = impl->solver.emplace<1>();
    ldlt.compute(Eigen::SparseMatrix<double>(*s));
    if (ldlt.info() != Eigen::Success) {
      throw Error(ErrorCode::NotPositiveDefinite, "sparse Cholesky hit a non-positive pivot");
    }
    check_pivots(ldlt.vectorD(), s->diagonal().cwiseAbs().maxCoeff());
  } else {
    const Matrix& m = *op.dense_matrix();
    auto& llt = impl->solver.emplace<0>(m);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::NotPositiveDefinite, "Cholesky hit a non-positive pivot");
    }
    check_pivots(llt.matrixLLT().diagonal().array().square().matrix(), m.diagonal().cwiseAbs().maxCoeff());
  }
  impl_ = std::move(impl);
}

Vector Factorization::solve(const Vector& rhs) const {
  if (rhs.size() != n_) throw Error(ErrorCode::DimensionMismatch, "solve: rhs length");
  if (!rhs.allFinite()) throw Error(ErrorCode::NonFinite, "solve: non-finite right-hand side");
  return std::visit([&](const auto& s) -> Vector { return s.solve(rhs); }, impl_->solver);
}

ProbeCorrelation ProbeCorrelation::identity(Eigen::Index n) {
  ProbeCorrelation c;
  c.n_ = n;
  return c;
}

ProbeCorrelation ProbeCorrelation::from_matrix(const Matrix& lambda) {
  check_symmetric(lambda);
  ProbeCorrelation c;
  c.n_ = lambda.rows();
  Eigen::LLT<Matrix> llt(lambda);
  if (llt.info() == Eigen::Success && (Matrix(llt.matrixL()).diagonal().array() > 0.0).all()) {
    c.factor_ = Matrix(llt.matrixL());
    return c;
  }
  // Semidefinite: P Λ Pᵀ = L D Lᵀ, so F = Pᵀ L D^{1/2}.
  Eigen::LDLT<Matrix> ldlt(lambda);
  const Vector d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  Matrix l = ldlt.matrixL();
  Matrix f = ldlt.transpositionsP().transpose() * (l * d.asDiagonal());
  if ((f * f.transpose() - lambda).norm() > 1e-10 * std::max(1.0, lambda.norm())) {
    throw Error(ErrorCode::InvalidSpec, "probe correlation is not positive semidefinite");
  }
  c.factor_ = std::move(f);
  return c;
}

Matrix ProbeCorrelation::factor() const {
  return factor_ ? *factor_ : Matrix(Matrix::Identity(n_, n_));
}

Vector standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
  return z;
}

Vector ProbeCorrelation::sample(Rng& rng) const {
  Vector z = standard_normal(n_, rng);
  if (!factor_) return z;
  return *factor_ * z;
}

void require_finite(const Vector& v, const char* where) {
  if (!v.allFinite()) throw Error(ErrorCode::NonFinite, where);
}

PowerResult generalized_spectral_norm(const SpdOperator& num, const Factorization& den, double tol,
                                      int max_iter, Rng& rng) {
  if (num.dim() != den.dim()) throw Error(ErrorCode::DimensionMismatch, "power method operands");
  if (!(tol > 0.0) || max_iter < 1) throw Error(ErrorCode::InvalidSpec, "power method tol/max_iter");
  PowerResult out;
  Vector v = standard_normal(num.dim(), rng);
  Vector w = den.solve(v);
  double nrm2 = v.dot(w);
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Vector v_next = num.apply(w);
    // wᵀ num w / vᵀ den⁻¹ v is the Rayleigh quotient of den^{-1/2} num den^{-1/2}.
    out.max_rayleigh = std::max(out.max_rayleigh, w.dot(v_next) / nrm2);
    Vector w_next = den.solve(v_next);
    const double next2 = v_next.dot(w_next);
    const double ratio = std::sqrt(next2 / nrm2);
    if (!std::isfinite(ratio)) throw Error(ErrorCode::NonFinite, "power method overflow");
    out.value = ratio;
    out.iterations = it;
    if (it > 1 && std::abs(ratio - prev) <= tol * ratio) {
      out.converged = true;
      break;
    }
    prev = ratio;
    const double scale = 1.0 / std::sqrt(next2);
    v = v_next * scale;
    w = w_next * scale;
    nrm2 = 1.0;
  }
  return out;
}

}  // namespace opaug
