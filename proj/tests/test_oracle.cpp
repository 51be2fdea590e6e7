#include <catch_amalgamated.hpp>

#include "opaug/oracle.hpp"
#include "opaug/problems.hpp"

using namespace opaug;
using namespace opaug::oracle;
using Catch::Matchers::WithinAbs;

namespace {

DiscreteEnsemble scalar_ensemble() {
  return DiscreteEnsemble({{0.5, SpdOperator::scalar(0.5)}, {0.5, SpdOperator::scalar(1.5)}});
}

const Matrix kOne = Matrix::Identity(1, 1);

}  // namespace

TEST_CASE("scalar two-point factors") {
  const auto ens = scalar_ensemble();
  CHECK_THAT(exact_beta_energy(ens, kOne, kOne), WithinAbs(0.4, 1e-12));
  const auto ag = exact_beta_ag(ens, kOne, kOne, kOne);
  CHECK_THAT(ag.beta_star, WithinAbs(0.4, 1e-12));
  CHECK_THAT(ag.beta_lower, WithinAbs(0.2, 1e-12));
  CHECK_THAT(exact_beta_basic(ens, Vector::Ones(1)), WithinAbs(0.2, 1e-12));
  CHECK_THAT(exact_truncated_factor(ens, kOne, kOne, 1, WindowKind::soft()), WithinAbs(0.1, 1e-12));
  CHECK_THAT(exact_truncated_factor(ens, kOne, kOne, 2, WindowKind::soft()), WithinAbs(0.59375 / 1.875, 1e-12));
  CHECK_THAT(exact_truncated_factor(ens, kOne, kOne, 1, WindowKind::hard()), WithinAbs(2.0 / 7.0, 1e-12));
  CHECK_THAT(exact_truncated_factor(ens, kOne, kOne, 25, WindowKind::soft()), WithinAbs(0.4, 1e-3));
  CHECK(ensemble_shift(ens, kOne) == 1.5);
  const auto m = exact_moments(ens, kOne, 3);
  CHECK_THAT(m.inv_mean(0, 0), WithinAbs(4.0 / 3.0, 1e-15));
  CHECK_THAT(m.x_powers[1](0, 0), WithinAbs(0.0, 1e-15));
  CHECK_THAT(m.x_powers[2](0, 0), WithinAbs(0.25, 1e-15));
}

TEST_CASE("degenerate ensemble") {
  const DiscreteEnsemble ens({{1.0, SpdOperator::scalar(1.0)}});
  CHECK(exact_beta_energy(ens, kOne, kOne) == 0.0);
  const auto ag = exact_beta_ag(ens, kOne, kOne, kOne);
  CHECK(ag.beta_star == 0.0);
  CHECK(ag.beta_lower == 0.0);
  const auto l = check_loewner(ens, kOne);
  CHECK(l.passed);
  CHECK(l.margin == 0.0);
}

TEST_CASE("diagonal ensemble matches a four-outcome summation") {
  // two independent scalar edges, each tied to its own boundary vertex
  const auto fam = MatrixFamily(NoiseModel::two_point(0.5, 1.5),
                                std::make_shared<LaplacianMap>(IncidenceStructure::make(4, {{0, 2}, {1, 3}}, {2, 3}), 0.0));
  const auto ens = make_discrete(fam, {1.0, 1.0});
  REQUIRE(ens.size() == 4);
  Matrix L(2, 2);
  L << 2.0, 0.5, 0.5, 1.0;
  const Matrix A = Matrix::Identity(2, 2);
  double num = 0.0, den = 0.0;
  for (double a : {0.5, 1.5}) {
    for (double b : {0.5, 1.5}) {
      const Vector inv(Vector::Map(std::array{1.0 / a, 1.0 / b}.data(), 2));
      // L diagonal entries weight each coordinate; off-diagonals drop out for diagonal Â
      num += 0.25 * (L(0, 0) * inv[0] * (inv[0] - 1.0) + L(1, 1) * inv[1] * (inv[1] - 1.0));
      den += 0.25 * (L(0, 0) * inv[0] * inv[0] + L(1, 1) * inv[1] * inv[1]);
    }
  }
  CHECK_THAT(exact_beta_energy(ens, A, L), WithinAbs(num / den, 1e-12));
  CHECK_THAT(exact_beta_energy(ens, A, A), WithinAbs(0.4, 1e-12));
}

TEST_CASE("AG lower bound never exceeds the optimum") {
  Rng rng = substream(3, 0);
  for (int t = 0; t < 40; ++t) {
    const Eigen::Index n = 1 + t % 5;
    const Matrix A = random_spd(n, 0.5, 3.0, rng);
    const auto ens = t % 2 ? random_mean_zero_ensemble(A, 3, 0.9, rng) : random_wide_ensemble(A, 3, 0.1, rng);
    const Matrix R = random_spd(n, 0.5, 2.0, rng);
    const auto f = exact_beta_ag(ens, A, R, R);  // R and B = R commute
    CHECK(f.beta_lower <= f.beta_star + 1e-12);
  }
}

TEST_CASE("size limits") {
  const DiscreteEnsemble big({{1.0, SpdOperator::identity(9)}});
  try {
    exact_beta_energy(big, Matrix::Identity(9, 9), Matrix::Identity(9, 9));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLarge);
  }
  CHECK_THROWS_AS(exact_truncated_factor(scalar_ensemble(), kOne, kOne, 65, WindowKind::soft()), Error);
}

TEST_CASE("shifted window at unit shift equals the hard window") {
  Rng rng = substream(4, 0);
  const Matrix A = random_spd(3, 0.5, 3.0, rng);
  const auto ens = random_mean_zero_ensemble(A, 3, 0.8, rng);
  const Matrix L = random_spd(3, 0.5, 2.0, rng);
  for (int N = 1; N <= 4; ++N) {
    CHECK_THAT(exact_truncated_factor(ens, A, L, 2 * N, WindowKind::shifted(1.0)),
               WithinAbs(exact_truncated_factor(ens, A, L, N, WindowKind::hard()), 1e-12));
  }
}

TEST_CASE("Loewner check") {
  const auto s = check_loewner(scalar_ensemble(), kOne);
  CHECK(s.passed);
  CHECK(s.precondition_ok);
  CHECK_THAT(s.margin, WithinAbs(1.0 / 3.0, 1e-15));
  const DiscreteEnsemble up({{0.5, SpdOperator::scalar(1.5)}, {0.5, SpdOperator::scalar(2.5)}});
  CHECK_FALSE(check_loewner(up, kOne).precondition_ok);
}

TEST_CASE("trace inequality") {
  const Matrix S = Matrix::Identity(2, 2);
  const std::vector<WeightedMatrix> det{{1.0, Matrix::Identity(2, 2)}};
  const auto a = check_trace_inequality(det, S, 2, 3, 1);
  CHECK(a.passed);
  CHECK(a.margin == 0.0);
  Rng rng = substream(5, 0);
  const std::vector<WeightedMatrix> two{{0.3, random_spd(2, 0.0, 2.0, rng)}, {0.7, random_spd(2, 0.0, 2.0, rng)}};
  const auto r0 = check_trace_inequality(two, S, 2, 3, 0);
  CHECK(r0.passed);
  CHECK(r0.margin == 0.0);
  CHECK(check_trace_inequality(two, S, 2, 3, 1).passed);
  Matrix neg = Matrix::Identity(2, 2);
  neg(0, 0) = -1.0;
  const std::vector<WeightedMatrix> bad{{1.0, neg}};
  CHECK_FALSE(check_trace_inequality(bad, S, 1, 2, 1).precondition_ok);
  CHECK_FALSE(check_trace_inequality(two, S, 3, 2, 1).precondition_ok);
  CHECK_FALSE(check_trace_inequality(two, S, 1, 2, 2).precondition_ok);
}

TEST_CASE("monotone ratio") {
  const std::vector<double> a{1, 2, 3, 4};
  const auto same = check_monotone_ratio(a, a);
  CHECK(same.passed);
  for (double r : same.ratios) CHECK(r == 1.0);
  std::vector<double> odd, even;
  for (int k = 1; k <= 8; ++k) {
    odd.push_back(2.0 * k - 1.0);
    even.push_back(2.0 * k);
  }
  const auto prim = check_monotone_ratio(odd, even);
  CHECK(prim.hypothesis_holds);
  CHECK(prim.passed);
  for (std::size_t i = 1; i < prim.ratios.size(); ++i) CHECK(prim.ratios[i] > prim.ratios[i - 1]);
  CHECK(prim.ratios.back() < 1.0);
  const std::vector<double> dec{1.0, 0.5}, ones{1.0, 1.0};
  CHECK_FALSE(check_monotone_ratio(dec, ones).hypothesis_holds);
  const std::vector<double> zero_first{0.0, 1.0};
  CHECK_FALSE(check_monotone_ratio(ones, zero_first).precondition_ok);
}

TEST_CASE("Neumann tail") {
  const Matrix Y = random_spd(3, 1.0, 2.0, *std::make_unique<Rng>(substream(6, 0)));
  const auto same = check_neumann_tail(Y, Y);
  CHECK(same.passed);
  CHECK(same.residuals[0] < 1e-12);
  const auto half = check_neumann_tail(Matrix::Constant(1, 1, 0.5), kOne);
  CHECK(half.passed);
  CHECK_THAT(half.rho, WithinAbs(0.5, 1e-6));
  CHECK_THAT(half.residuals[1] / half.residuals[0], WithinAbs(0.5, 1e-12));
  Rng rng = substream(7, 0);
  const Matrix Y5 = random_spd(5, 0.5, 3.0, rng);
  Matrix m = random_spd(5, -0.5, 0.5, rng);
  m(0, 0) = 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Vector d = es.eigenvalues();
  d[d.size() - 1] = 0.8;
  const Matrix mm = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> ey(Y5);
  const Matrix X = ey.operatorSqrt() * (Matrix::Identity(5, 5) - mm) * ey.operatorSqrt();
  const auto r = check_neumann_tail(0.5 * (X + X.transpose()), Y5);
  CHECK(r.passed);
  CHECK(r.rho >= 0.7);
  CHECK(r.rho <= 0.9);
  try {
    check_neumann_tail(Matrix::Constant(1, 1, 2.5), kOne);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PreconditionViolated);
  }
}

TEST_CASE("monotone chains on random ensembles") {
  Rng rng = substream(8, 0);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = 1 + t % 6;
    const Matrix A = random_spd(n, 0.5, 3.0, rng);
    const Matrix L = random_spd(n, 0.2, 2.0, rng);
    const auto soft = check_chain(random_mean_zero_ensemble(A, 3, 0.95, rng), A, L, 8, WindowKind::soft());
    INFO(soft.detail);
    CHECK(soft.passed);
    const auto wide = random_wide_ensemble(A, 3, 0.1, rng);
    const auto shifted = check_chain(wide, A, L, 8, WindowKind::shifted(ensemble_shift(wide, A)));
    INFO(shifted.detail);
    CHECK(shifted.passed);
  }
}

TEST_CASE("lemma suites at reduced size") {
  SuiteSizes sizes{20, 40, 20, 20, 10, 10};
  for (const auto& s : run_lemma_suites(123, sizes)) {
    INFO(s.name << ": " << s.first_failure);
    CHECK(s.failures == 0);
    CHECK(s.precondition_skips < s.instances);
  }
}

TEST_CASE("oracle cases") {
  const auto text = run_oracle_case("scalar-two-point");
  CHECK(text.find("beta* (energy)      = 0.4") != std::string::npos);
  CHECK(text.find("beta_lower (AG)     = 0.2") != std::string::npos);
  CHECK(text.find("0.1 0.316667") != std::string::npos);
  CHECK_NOTHROW(run_oracle_case("diag-two-point"));
  CHECK_THROWS_AS(run_oracle_case("nope"), Error);
}
