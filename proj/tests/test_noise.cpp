#include <catch_amalgamated.hpp>

#include <set>

#include "opaug/noise.hpp"
#include "opaug/problems.hpp"

using namespace opaug;
using Catch::Matchers::WithinAbs;

TEST_CASE("noise grammar") {
  auto tp = NoiseModel::parse("two-point:0.5,1.5");
  CHECK(tp.tag == NoiseTag::TwoPoint);
  CHECK(tp.first == 0.5);
  CHECK(tp.second == 1.5);
  CHECK(tp.mean() == 1.0);
  auto g = NoiseModel::parse("gamma:1,0.45");
  CHECK(g.tag == NoiseTag::Gamma);
  CHECK(g.second == 0.45);
  auto b = NoiseModel::parse("bernoulli:0.75");
  CHECK(b.tag == NoiseTag::BernoulliKeep);
  CHECK(NoiseModel::parse("none").is_degenerate());
  CHECK(NoiseModel::parse(tp.describe()).first == 0.5);
  for (const char* bad : {"", "two-point", "two-point:0.5", "two-point:a,b", "gauss:1", "bernoulli:1.5",
                          "bernoulli:0", "gamma:1,-1", "two-point:-1,3", "bernoulli:0.5,0.5"}) {
    INFO(bad);
    CHECK_THROWS_AS(NoiseModel::parse(bad), Error);
  }
}

TEST_CASE("degenerate noise leaves the operator unchanged") {
  const auto inst = build_grid_1d(5, NoiseModel::degenerate());
  Rng rng = substream(1, 0);
  for (int i = 0; i < 20; ++i) {
    const auto obs = sample(inst.family, inst.omega_true, rng);
    CHECK(obs.omega_hat == inst.omega_true);
    CHECK((obs.op.to_dense() - inst.truth.to_dense()).norm() == 0.0);
    CHECK((bootstrap_sample(inst.family, obs.omega_hat, rng).to_dense() - inst.truth.to_dense()).norm() == 0.0);
  }
}

TEST_CASE("two-point draws on a unit path") {
  const auto inst = build_grid_1d(3, NoiseModel::two_point(0.5, 1.5));
  Rng rng = substream(2, 0);
  double sum = 0.0;
  std::size_t count = 0;
  while (count < 100000) {
    for (double w : sample(inst.family, inst.omega_true, rng).omega_hat) {
      CHECK((w == 0.5 || w == 1.5));
      sum += w;
      ++count;
    }
  }
  CHECK(sum / count >= 0.99);
  CHECK(sum / count <= 1.01);
}

TEST_CASE("bernoulli keep frequency") {
  const auto inst = build_grid_1d(3, NoiseModel::bernoulli(0.75));
  Rng rng = substream(3, 0);
  std::size_t zeros = 0, count = 0;
  while (count < 100000) {
    for (double w : inst.family.perturb(inst.omega_true, rng)) {
      CHECK((w == 0.0 || std::abs(w - 4.0 / 3.0) < 1e-15));
      zeros += w == 0.0;
      ++count;
    }
  }
  CHECK_THAT(static_cast<double>(zeros) / count, WithinAbs(0.25, 0.01));
}

TEST_CASE("bootstrap composes multiplicatively") {
  const auto fam = MatrixFamily::scalar(NoiseModel::two_point(0.5, 1.5));
  Rng rng = substream(4, 0);
  std::size_t low = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = bootstrap_sample(fam, {1.5}, rng).to_dense()(0, 0);
    CHECK((v == 0.75 || v == 2.25));
    low += v == 0.75;
  }
  CHECK_THAT(static_cast<double>(low) / n, WithinAbs(0.5, 0.02));
}

TEST_CASE("gamma bootstrap mean") {
  const auto fam = MatrixFamily::scalar(NoiseModel::gamma(1.0, 0.45));
  Rng rng = substream(5, 0);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double w = fam.perturb({2.0}, rng)[0];
    sum += w;
    sq += w * w;
  }
  CHECK_THAT(sum / n, WithinAbs(2.0, 0.02));
  const double var = sq / n - (sum / n) * (sum / n);
  CHECK_THAT(std::sqrt(var), WithinAbs(0.9, 0.02));
}

TEST_CASE("gamma unbiasedness on a grid") {
  const auto inst = build_grid_1d(4, NoiseModel::gamma(1.0, 0.45));
  Rng rng = substream(6, 0);
  Matrix mean = Matrix::Zero(4, 4);
  const int n = 1000000;
  for (int i = 0; i < n; ++i) mean += sample(inst.family, inst.omega_true, rng).op.to_dense();
  mean /= n;
  CHECK((mean - inst.truth.to_dense()).norm() <= 1e-3 * inst.truth.to_dense().norm());
}

TEST_CASE("discrete enumeration") {
  SECTION("one edge") {
    const auto e = make_discrete(MatrixFamily::scalar(NoiseModel::two_point(0.5, 1.5)), {1.0});
    REQUIRE(e.size() == 2);
    for (const auto& o : e.outcomes()) CHECK(o.probability == 0.5);
    CHECK_THAT(e.mean()(0, 0), WithinAbs(1.0, 1e-15));
  }
  SECTION("two edges") {
    const auto inst = build_grid_1d(1);
    const auto e = make_discrete(inst.family, inst.omega_true);
    REQUIRE(e.size() == 4);
    for (const auto& o : e.outcomes()) CHECK(o.probability == 0.25);
    CHECK((e.mean() - inst.truth.to_dense()).norm() < 1e-14);
  }
  SECTION("three edges, bernoulli") {
    const auto fam = MatrixFamily(NoiseModel::bernoulli(0.75),
                                  std::make_shared<LaplacianMap>(IncidenceStructure::make(3, {{0, 1}, {1, 2}, {0, 2}}), 1.0));
    const auto e = make_discrete(fam, {1.0, 1.0, 1.0});
    REQUIRE(e.size() == 8);
    std::multiset<double> probs;
    for (const auto& o : e.outcomes()) probs.insert(o.probability);
    const std::multiset<double> expected{0.25 * 0.25 * 0.25, 0.75 * 0.25 * 0.25, 0.75 * 0.25 * 0.25,
                                         0.75 * 0.25 * 0.25, 0.75 * 0.75 * 0.25, 0.75 * 0.75 * 0.25,
                                         0.75 * 0.75 * 0.25, 0.75 * 0.75 * 0.75};
    auto a = probs.begin();
    for (double p : expected) CHECK_THAT(*a++, WithinAbs(p, 1e-15));
    CHECK((e.mean() - fam.assemble({1.0, 1.0, 1.0}).to_dense()).norm() < 1e-13);
  }
  SECTION("limits") {
    const auto inst = build_grid_1d(30);
    CHECK_THROWS_AS(make_discrete(inst.family, inst.omega_true), Error);
    const auto g = build_grid_1d(2, NoiseModel::gamma(1.0, 0.45));
    try {
      make_discrete(g.family, g.omega_true);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedModel);
    }
  }
}

TEST_CASE("ensemble validation") {
  using O = DiscreteEnsemble::Outcome;
  CHECK_THROWS_AS(DiscreteEnsemble({}), Error);
  CHECK_THROWS_AS(DiscreteEnsemble({O{0.5, SpdOperator::scalar(1.0)}}), Error);
  CHECK_THROWS_AS(DiscreteEnsemble({O{0.5, SpdOperator::scalar(1.0)}, O{0.5, SpdOperator::identity(2)}}), Error);
  CHECK_NOTHROW(DiscreteEnsemble({O{0.1, SpdOperator::scalar(1.0)}, O{0.2, SpdOperator::scalar(1.0)},
                                  O{0.7, SpdOperator::scalar(1.0)}}));
}

TEST_CASE("sampled Dirichlet operators factorize") {
  const auto inst = build_grid_1d(32, NoiseModel::two_point(0.5, 1.5));
  Rng rng = substream(8, 0);
  for (int i = 0; i < 10000; ++i) CHECK_NOTHROW(sample(inst.family, inst.omega_true, rng).op.factorization());
  const auto g = build_grid_1d(32, NoiseModel::gamma(1.0, 0.45));
  for (int i = 0; i < 10000; ++i) CHECK_NOTHROW(sample(g.family, g.omega_true, rng).op.factorization());
}
