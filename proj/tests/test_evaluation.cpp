#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "opaug/evaluation.hpp"

using namespace opaug;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ProblemInstance scalar_instance(NoiseModel noise) {
  return make_instance("scalar", IncidenceStructure::make(2, {{0, 1}}, {1}), {1.0}, 0.0, noise);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("ratio of means") {
  const std::vector<double> err{1.0, 3.0}, ref{2.0, 2.0};
  CHECK(ratio_of_means(err, ref).value == 1.0);
  const std::vector<double> same(10, 0.5), ones(10, 1.0);
  const auto s = ratio_of_means(same, ones);
  CHECK(s.value == 0.5);
  CHECK(s.two_sigma == 0.0);
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(ratio_of_means(one, one), Error);
  CHECK_THROWS_AS(ratio_of_means(err, one), Error);
}

TEST_CASE("delta-method half-width matches a resampling oracle") {
  Rng rng = substream(17, 0);
  std::gamma_distribution<double> g(2.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.3);
  const std::size_t T = 200;
  std::vector<double> err(T), ref(T);
  for (std::size_t t = 0; t < T; ++t) {
    ref[t] = g(rng);
    err[t] = std::abs(0.3 * ref[t] + noise(rng));
  }
  const auto stat = ratio_of_means(err, ref);
  std::uniform_int_distribution<std::size_t> pick(0, T - 1);
  const int reps = 1000000;
  double s1 = 0.0, s2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    double a = 0.0, b = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const auto i = pick(rng);
      a += err[i];
      b += ref[i];
    }
    const double v = a / b;
    s1 += v;
    s2 += v * v;
  }
  const double sd = std::sqrt(s2 / reps - (s1 / reps) * (s1 / reps));
  CHECK_THAT(stat.two_sigma, WithinRel(2.0 * sd, 0.2));
}

TEST_CASE("method tags") {
  CHECK(MethodSpec::parse("naive") == MethodSpec::naive());
  CHECK(MethodSpec::parse("teag-s:4") == MethodSpec::of(Method::TEAGSoft, 4));
  CHECK(MethodSpec::parse("teag-h:2") == MethodSpec::of(Method::TEAGHard, 2));
  CHECK(MethodSpec::parse("asteag:6") == MethodSpec::of(Method::ASTEAG, 6));
  CHECK(MethodSpec::parse("basic") == MethodSpec::of(Method::Basic));
  CHECK(MethodSpec::of(Method::TEAGSoft, 4).spec(10, 1e-6, 200).order == 2);
  CHECK(MethodSpec::of(Method::ASTEAG, 4).spec(10, 1e-6, 200).order == 4);
  CHECK(MethodSpec::of(Method::TEAGSoft, 4).tag() == "teag-s:4");
  CHECK(MethodSpec::of(Method::TEAGHard, 2).window_label() == "hard");
  for (const char* bad : {"teag-s:3", "teag-s", "ag:2", "asteag", "asteag:0", "foo", "teag-s:x"}) {
    INFO(bad);
    CHECK_THROWS_AS(MethodSpec::parse(bad), Error);
  }
  const auto list = parse_methods("naive, ag,eag,teag-s:2");
  CHECK(list.size() == 4);
  CHECK_THROWS_AS(parse_methods("ag,ag"), Error);
  CHECK_THROWS_AS(parse_methods(""), Error);
  CHECK(default_methods(true).size() == 11);
  CHECK(default_methods(false).size() == 6);
}

TEST_CASE("scalar trials enumerate the two outcomes") {
  const auto inst = scalar_instance(NoiseModel::two_point(0.5, 1.5));
  const std::vector<MethodSpec> methods{MethodSpec::naive()};
  Rng rng = substream(5, 0);
  std::vector<TrialResult> trials;
  for (int t = 0; t < 4000; ++t) {
    auto r = run_trial(inst, methods, 10, rng);
    const double ratio = r.methods[0].l2_err / r.l2_ref;
    CHECK((std::abs(ratio - 1.0) < 1e-12 || std::abs(ratio - 1.0 / 9.0) < 1e-12));
    trials.push_back(std::move(r));
  }
  const auto rep = aggregate(trials, methods);
  CHECK(std::abs(rep.rows[0].r_mse - 5.0 / 9.0) <= 2.0 * rep.rows[0].r_mse_2sigma);

  // energy error with the oracle factor 0.4, enumerated over both outcomes
  double e = 0.0;
  AugmentationSpec spec;
  spec.method = Method::EAG;
  for (double a : {0.5, 1.5}) {
    const double x = augmented_solve(factorize(SpdOperator::scalar(a)), spec, 0.4, Vector::Ones(1))[0];
    e += 0.5 * (x - 1.0) * (x - 1.0);
  }
  CHECK_THAT(e, WithinAbs(0.2, 1e-15));
}

TEST_CASE("degenerate noise reports zero") {
  BenchmarkConfig cfg;
  cfg.n = 8;
  cfg.noise = NoiseModel::degenerate();
  cfg.trials = 20;
  cfg.samples = 5;
  cfg.methods = default_methods(true);
  const auto rep = run_benchmark(cfg);
  for (const auto& r : rep.rows) {
    INFO(r.method.tag());
    CHECK(r.r_mse <= 1e-20);
    CHECK(r.r_emse <= 1e-20);
    CHECK(r.r_emse_2sigma <= 1e-20);
  }
}

TEST_CASE("benchmark is deterministic across thread counts") {
  BenchmarkConfig cfg;
  cfg.n = 16;
  cfg.trials = 60;
  cfg.samples = 10;
  cfg.seed = 42;
  cfg.methods = default_methods(true);
  cfg.threads = 1;
  const auto a = to_csv(run_benchmark(cfg));
  cfg.threads = 4;
  const auto b = to_csv(run_benchmark(cfg));
  CHECK(a == b);
  cfg.seed = 43;
  CHECK(to_csv(run_benchmark(cfg)) != a);
}

TEST_CASE("report formats") {
  BenchmarkConfig cfg;
  cfg.n = 8;
  cfg.trials = 10;
  cfg.samples = 4;
  cfg.methods = parse_methods("naive,ag,teag-s:2,asteag:2");
  const auto rep = run_benchmark(cfg);
  const auto csv = to_csv(rep);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "method,order,window,r_mse,r_mse_2sigma,r_emse,r_emse_2sigma,seconds");
  std::getline(in, line);
  CHECK(line.starts_with("naive,,,"));
  CHECK(line.ends_with(",NA"));
  std::getline(in, line);
  CHECK(line.starts_with("ag,,,"));
  std::getline(in, line);
  CHECK(line.starts_with("teag-s:2,2,soft,"));
  std::getline(in, line);
  CHECK(line.starts_with("asteag:2,2,shifted,"));
  CHECK(!to_csv(rep, true).ends_with("NA\n"));
  const auto md = to_markdown(rep);
  CHECK(md.find("| Method | Order | Window | R. MSE | ±2σ | R. EMSE | ±2σ |") != std::string::npos);
  CHECK(md.find("| **T-EAG** | 2 | Soft |") != std::string::npos);
  CHECK(md.find("| **Naive** | --- | --- |") != std::string::npos);
}

TEST_CASE("config validation") {
  BenchmarkConfig cfg;
  cfg.trials = 1;
  CHECK_THROWS_AS(run_benchmark(cfg), Error);
  cfg.trials = 5;
  cfg.problem = ProblemKind::Graph;
  CHECK_THROWS_AS(run_benchmark(cfg), Error);
  CHECK(parse_problem("sparsify") == ProblemKind::Sparsify);
  CHECK_THROWS_AS(parse_problem("poisson3d"), Error);
}

TEST_CASE("graph and sparsify problems run") {
  BenchmarkConfig cfg;
  cfg.problem = ProblemKind::Graph;
  cfg.edges = std::string(OPAUG_DATA_DIR) + "/graphs/preferential.txt";
  cfg.trials = 4;
  cfg.samples = 4;
  cfg.methods = parse_methods("naive,eag");
  const auto g = run_benchmark(cfg);
  CHECK(g.rows.size() == 2);
  cfg.problem = ProblemKind::Sparsify;
  cfg.noise = NoiseModel::bernoulli(0.75);
  const auto s = run_benchmark(cfg);
  CHECK(s.rows[0].r_emse > 0.0);
}

TEST_CASE("atomic writes") {
  const auto dir = std::filesystem::temp_directory_path() / "opaug_write_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "report.csv";
  write_atomic(path, "a,b\n1,2\n");
  CHECK(slurp(path) == "a,b\n1,2\n");
  write_atomic(path, "x\n");
  CHECK(slurp(path) == "x\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  try {
    write_atomic(dir / "missing" / "r.csv", "x");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
  std::filesystem::remove_all(dir);
}
