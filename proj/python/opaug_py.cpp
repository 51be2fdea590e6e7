#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "opaug/evaluation.hpp"
#include "opaug/oracle.hpp"

namespace py = pybind11;
using namespace opaug;

namespace {

using OutcomeList = std::vector<std::pair<double, Matrix>>;

DiscreteEnsemble to_ensemble(const OutcomeList& outcomes) {
  if (outcomes.empty()) throw Error(ErrorCode::InvalidSpec, "ensemble needs at least one outcome");
  std::vector<DiscreteEnsemble::Outcome> out;
  for (const auto& [p, m] : outcomes) out.push_back({p, SpdOperator::dense(m)});
  return DiscreteEnsemble(std::move(out));
}

WindowKind to_window(const std::string& name, double alpha) {
  if (name == "soft") return WindowKind::soft();
  if (name == "hard") return WindowKind::hard();
  if (name == "shifted") return WindowKind::shifted(alpha);
  throw Error(ErrorCode::ConfigError, "window must be soft, hard or shifted");
}

BenchmarkConfig make_config(const std::string& problem, std::size_t n, std::size_t nx, std::size_t ny,
                            const std::string& edges, std::size_t boundary, double gamma,
                            const std::string& noise, const std::string& methods, std::size_t trials,
                            std::size_t samples, std::uint64_t seed, unsigned threads) {
  BenchmarkConfig c;
  c.problem = parse_problem(problem);
  c.n = n;
  c.nx = nx;
  c.ny = ny;
  c.edges = edges;
  c.boundary = boundary;
  c.gamma = gamma;
  c.noise = NoiseModel::parse(noise);
  if (!methods.empty()) c.methods = parse_methods(methods);
  c.trials = trials;
  c.samples = samples;
  c.seed = seed;
  c.threads = threads;
  return c;
}

py::dict row_dict(const ReportRow& r) {
  py::dict d;
  d["method"] = r.method.tag();
  d["order"] = r.method.order;
  d["window"] = r.method.window_label();
  d["r_mse"] = r.r_mse;
  d["r_mse_2sigma"] = r.r_mse_2sigma;
  d["r_emse"] = r.r_emse;
  d["r_emse_2sigma"] = r.r_emse_2sigma;
  d["mean_beta"] = r.mean_beta;
  return d;
}

}  // namespace

PYBIND11_MODULE(_opaug, m) {
  m.doc() = "Operator augmentation estimators, benchmarks and exact oracles";

  static py::exception<Error> exc(m, "OpaugError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(exc.ptr(), e.what());
    }
  });

  m.def("poisson1d_matrix", [](std::size_t n) { return build_grid_1d(n).truth.to_dense(); }, py::arg("n"),
        "Dense noiseless 1D grid operator.");
  m.def("poisson2d_matrix", [](std::size_t nx, std::size_t ny) { return build_grid_2d(nx, ny).truth.to_dense(); },
        py::arg("nx"), py::arg("ny"));
  m.def("noise_describe", [](const std::string& s) { return NoiseModel::parse(s).describe(); });

  m.def(
      "run_benchmark",
      [](const std::string& problem, std::size_t n, std::size_t nx, std::size_t ny, const std::string& edges,
         std::size_t boundary, double gamma, const std::string& noise, const std::string& methods,
         std::size_t trials, std::size_t samples, std::uint64_t seed, unsigned threads) {
        const auto cfg =
            make_config(problem, n, nx, ny, edges, boundary, gamma, noise, methods, trials, samples, seed, threads);
        BenchmarkReport report;
        {
          py::gil_scoped_release release;
          report = run_benchmark(cfg);
        }
        py::list rows;
        for (const auto& r : report.rows) rows.append(row_dict(r));
        return py::make_tuple(rows, to_csv(report));
      },
      py::arg("problem") = "poisson1d", py::arg("n") = 128, py::arg("nx") = 32, py::arg("ny") = 32,
      py::arg("edges") = "", py::arg("boundary") = 6, py::arg("gamma") = 1.0,
      py::arg("noise") = "two-point:0.5,1.5", py::arg("methods") = "", py::arg("trials") = 5000,
      py::arg("samples") = 100, py::arg("seed") = 0, py::arg("threads") = 1,
      "Returns (rows, csv_text).");

  m.def(
      "estimate_beta",
      [](std::size_t n, const std::string& noise, const std::string& method, std::size_t samples,
         std::uint64_t seed) {
        const auto inst = build_grid_1d(n, NoiseModel::parse(noise));
        const auto spec_m = MethodSpec::parse(method);
        if (!spec_m.method) throw Error(ErrorCode::ConfigError, "naive has no factor");
        Rng rng = substream(seed, 0);
        const auto obs = sample(inst.family, inst.omega_true, rng);
        const Vector b = standard_normal(inst.dim(), rng);
        const auto id = ProbeCorrelation::identity(inst.dim());
        PreparedBatch batch(obs.op, draw_batch(bootstrap_sampler(inst.family, obs.omega_hat), samples, id, &id, rng));
        const auto est = estimate(batch, spec_m.spec(samples, 1e-6, 200), &b);
        py::dict d;
        d["beta"] = est.beta;
        d["raw_beta"] = est.raw_beta;
        d["numerator"] = est.numerator;
        d["denominator"] = est.denominator;
        d["std_error"] = est.std_error;
        return d;
      },
      py::arg("n"), py::arg("noise") = "two-point:0.5,1.5", py::arg("method") = "eag", py::arg("samples") = 100,
      py::arg("seed") = 0, "One observed draw on the 1D grid and its bootstrap factor.");

  m.def(
      "exact_beta_energy",
      [](const OutcomeList& o, const Matrix& A, const Matrix& L) {
        return oracle::exact_beta_energy(to_ensemble(o), A, L);
      },
      py::arg("outcomes"), py::arg("A"), py::arg("L"));
  m.def(
      "exact_beta_ag",
      [](const OutcomeList& o, const Matrix& A, const Matrix& R, const Matrix& B) {
        const auto f = oracle::exact_beta_ag(to_ensemble(o), A, R, B);
        return py::make_tuple(f.beta_star, f.beta_lower);
      },
      py::arg("outcomes"), py::arg("A"), py::arg("R"), py::arg("B"));
  m.def(
      "exact_truncated_factor",
      [](const OutcomeList& o, const Matrix& A, const Matrix& L, int N, const std::string& window, double alpha) {
        return oracle::exact_truncated_factor(to_ensemble(o), A, L, N, to_window(window, alpha));
      },
      py::arg("outcomes"), py::arg("A"), py::arg("L"), py::arg("N"), py::arg("window") = "soft",
      py::arg("alpha") = 1.0);
  m.def(
      "ensemble_shift", [](const OutcomeList& o, const Matrix& A) { return oracle::ensemble_shift(to_ensemble(o), A); },
      py::arg("outcomes"), py::arg("A"));
  m.def("oracle_case", &oracle::run_oracle_case, py::arg("name"));
  m.def(
      "run_lemma_suites",
      [](std::uint64_t seed) {
        py::list out;
        for (const auto& s : oracle::run_lemma_suites(seed)) {
          py::dict d;
          d["name"] = s.name;
          d["instances"] = s.instances;
          d["failures"] = s.failures;
          d["skipped"] = s.precondition_skips;
          d["worst_margin"] = s.worst_margin;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 1);
}
