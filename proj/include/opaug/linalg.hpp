#pragma once

#include <memory>
#include <optional>
#include <span>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "opaug/error.hpp"
#include "opaug/random.hpp"

namespace opaug {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class Factorization;

/// Symmetric positive definite operator, dense or sparse (row-compressed).
/// Definiteness is only checked when factorized.
class SpdOperator {
 public:
  static SpdOperator dense(Matrix m);
  static SpdOperator sparse(SparseMatrix m);
  static SpdOperator identity(Eigen::Index n);
  static SpdOperator scalar(double value);

  Eigen::Index dim() const;
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(storage_); }

  Vector apply(const Vector& x) const;
  Matrix to_dense() const;
  const SparseMatrix* sparse_matrix() const { return std::get_if<SparseMatrix>(&storage_); }
  const Matrix* dense_matrix() const { return std::get_if<Matrix>(&storage_); }

  /// Factorization cached on first use; thread-safe.
  std::shared_ptr<const Factorization> factorization() const;

 private:
  explicit SpdOperator(std::variant<Matrix, SparseMatrix> s) : storage_(std::move(s)) {}
  std::variant<Matrix, SparseMatrix> storage_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

/// Cholesky of an SpdOperator. Immutable; safe to share across threads.
class Factorization {
 public:
  explicit Factorization(const SpdOperator& op);

  Eigen::Index dim() const { return n_; }
  Vector solve(const Vector& rhs) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  Eigen::Index n_ = 0;
};

inline Factorization factorize(const SpdOperator& op) { return Factorization(op); }
inline Vector solve(const Factorization& f, const Vector& rhs) { return f.solve(rhs); }

/// Covariance Λ = F Fᵀ of Gaussian probes.
class ProbeCorrelation {
 public:
  static ProbeCorrelation identity(Eigen::Index n);
  /// Cholesky when Λ ≻ 0, pivoted LDLᵀ otherwise.
  static ProbeCorrelation from_matrix(const Matrix& lambda);

  Eigen::Index dim() const { return n_; }
  bool is_identity() const { return !factor_.has_value(); }
  /// F; materialized as I for the identity case.
  Matrix factor() const;
  Vector sample(Rng& rng) const;

 private:
  Eigen::Index n_ = 0;
  std::optional<Matrix> factor_;
};

inline Vector sample_probe(const ProbeCorrelation& corr, Rng& rng) { return corr.sample(rng); }

Vector standard_normal(Eigen::Index n, Rng& rng);

struct PowerResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  double max_rayleigh = 0.0;
};

/// Largest eigenvalue of den⁻¹·num by power iteration in the den⁻¹ norm.
PowerResult generalized_spectral_norm(const SpdOperator& num, const Factorization& den, double tol,
                                      int max_iter, Rng& rng);

void require_finite(const Vector& v, const char* where);

}  // namespace opaug
