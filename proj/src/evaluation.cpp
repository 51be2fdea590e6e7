#include "opaug/evaluation.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <charconv>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

namespace opaug {

RatioStat ratio_of_means(std::span<const double> err, std::span<const double> ref) {
  if (err.size() != ref.size()) throw Error(ErrorCode::DimensionMismatch, "err/ref lengths differ");
  const std::size_t t = err.size();
  if (t < 2) throw Error(ErrorCode::InsufficientTrials, "need at least 2 trials");
  double se = 0.0, sr = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    se += err[i];
    sr += ref[i];
  }
  if (!(sr > 0.0)) {
    // Degenerate reference (e.g. zero solutions): report the raw error mass.
    return {se, 0.0};
  }
  RatioStat out;
  out.value = se / sr;
  double ss = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    const double d = err[i] - out.value * ref[i];
    ss += d * d;
  }
  const double mean_ref = sr / t;
  out.two_sigma = 2.0 * std::sqrt(ss / (t * (t - 1.0))) / mean_ref;
  return out;
}

namespace {

int parse_order(std::string_view text, std::string_view full) {
  int v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || v < 1) {
    throw Error(ErrorCode::ConfigError, fmt::format("bad order in method '{}'", full));
  }
  return v;
}

}  // namespace

MethodSpec MethodSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const auto tag = text.substr(0, colon);
  const bool has_order = colon != std::string_view::npos;
  auto plain = [&](MethodSpec m) {
    if (has_order) throw Error(ErrorCode::ConfigError, fmt::format("method '{}' takes no order", tag));
    return m;
  };
  if (tag == "naive") return plain(naive());
  if (tag == "basic") return plain(of(Method::Basic));
  if (tag == "ag") return plain(of(Method::AG));
  if (tag == "eag") return plain(of(Method::EAG));
  if (tag == "teag-s" || tag == "teag-h" || tag == "asteag") {
    if (!has_order) throw Error(ErrorCode::ConfigError, fmt::format("method '{}' needs an order, e.g. {}:4", tag, tag));
    const int k = parse_order(text.substr(colon + 1), text);
    if (tag == "asteag") return of(Method::ASTEAG, k);
    if (k % 2 != 0) throw Error(ErrorCode::ConfigError, fmt::format("T-EAG order must be even, got {}", k));
    return of(tag == "teag-s" ? Method::TEAGSoft : Method::TEAGHard, k);
  }
  throw Error(ErrorCode::ConfigError, fmt::format("unknown method '{}'", text));
}

std::string MethodSpec::tag() const {
  if (!method) return "naive";
  switch (*method) {
    case Method::Basic: return "basic";
    case Method::AG: return "ag";
    case Method::EAG: return "eag";
    case Method::TEAGSoft: return fmt::format("teag-s:{}", order);
    case Method::TEAGHard: return fmt::format("teag-h:{}", order);
    case Method::ASTEAG: return fmt::format("asteag:{}", order);
  }
  return "?";
}

std::string MethodSpec::display_name() const {
  if (!method) return "Naive";
  if (*method == Method::TEAGSoft || *method == Method::TEAGHard) return "T-EAG";
  return method_name(*method);
}

std::string MethodSpec::window_label() const {
  if (method == Method::TEAGSoft) return "soft";
  if (method == Method::TEAGHard) return "hard";
  if (method == Method::ASTEAG) return "shifted";
  return "";
}

AugmentationSpec MethodSpec::spec(std::size_t M, double power_tol, int power_max_iter) const {
  if (!method) throw Error(ErrorCode::InvalidSpec, "naive has no augmentation spec");
  AugmentationSpec s;
  s.method = *method;
  s.samples = M;
  s.power_tol = power_tol;
  s.power_max_iter = power_max_iter;
  s.order = (*method == Method::TEAGSoft || *method == Method::TEAGHard) ? order / 2 : std::max(order, 1);
  return s;
}

std::vector<MethodSpec> parse_methods(std::string_view list) {
  std::vector<MethodSpec> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    auto item = list.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) throw Error(ErrorCode::ConfigError, "empty entry in method list");
    auto m = MethodSpec::parse(item);
    for (const auto& seen : out) {
      if (seen == m) throw Error(ErrorCode::ConfigError, fmt::format("method '{}' listed twice", item));
    }
    out.push_back(m);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw Error(ErrorCode::ConfigError, "method list is empty");
  return out;
}

std::vector<MethodSpec> default_methods(bool with_truncated_taylor) {
  std::vector<MethodSpec> m{MethodSpec::naive(), MethodSpec::of(Method::AG), MethodSpec::of(Method::EAG)};
  if (with_truncated_taylor) {
    for (int k : {2, 4, 6}) m.push_back(MethodSpec::of(Method::TEAGSoft, k));
    for (int k : {2, 4}) m.push_back(MethodSpec::of(Method::TEAGHard, k));
  }
  for (int k : {2, 4, 6}) m.push_back(MethodSpec::of(Method::ASTEAG, k));
  return m;
}

std::string_view problem_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Poisson1D: return "poisson1d";
    case ProblemKind::Poisson2D: return "poisson2d";
    case ProblemKind::Graph: return "graph";
    case ProblemKind::Sparsify: return "sparsify";
  }
  return "?";
}

ProblemKind parse_problem(std::string_view text) {
  for (auto k : {ProblemKind::Poisson1D, ProblemKind::Poisson2D, ProblemKind::Graph, ProblemKind::Sparsify}) {
    if (problem_name(k) == text) return k;
  }
  throw Error(ErrorCode::ConfigError, fmt::format("unknown problem '{}'", text));
}

ProblemInstance build_problem(const BenchmarkConfig& config) {
  switch (config.problem) {
    case ProblemKind::Poisson1D: return build_grid_1d(config.n, config.noise);
    case ProblemKind::Poisson2D: return build_grid_2d(config.nx, config.ny, config.noise);
    case ProblemKind::Graph:
    case ProblemKind::Sparsify: {
      if (config.edges.empty()) throw Error(ErrorCode::ConfigError, "graph problems need --edges");
      auto g = load_edge_list(config.edges);
      if (config.problem == ProblemKind::Sparsify) {
        auto inst = shifted_instance(g.structure, std::move(g.weights), config.gamma, config.noise);
        inst.name = fmt::format("sparsify {} gamma={}", config.edges.filename().string(), config.gamma);
        return inst;
      }
      auto s = select_boundary(g.structure, config.boundary, config.seed);
      return make_instance(fmt::format("graph {} boundary={}", config.edges.filename().string(), config.boundary),
                           std::move(s), std::move(g.weights), 0.0, config.noise);
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown problem");
}

TrialResult run_trial(const ProblemInstance& instance, std::span<const MethodSpec> methods, std::size_t M,
                      Rng& rng, const TrialOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto n = instance.dim();
  const auto obs = sample(instance.family, instance.omega_true, rng);
  const Vector b = instance.rhs_sign * standard_normal(n, rng);
  const Vector x = instance.truth.factorization()->solve(b);

  TrialResult out;
  out.l2_ref = x.squaredNorm();
  out.energy_ref = x.dot(instance.truth.apply(x));

  std::optional<PreparedBatch> prepared;
  const bool needs_batch = std::any_of(methods.begin(), methods.end(), [](const auto& m) { return m.method.has_value(); });
  const auto t0 = clock::now();
  const auto& obs_fact = *obs.op.factorization();
  if (needs_batch) {
    const auto id = ProbeCorrelation::identity(n);
    auto batch = draw_batch(bootstrap_sampler(instance.family, obs.omega_hat), M, id, &id, rng);
    prepared.emplace(obs.op, std::move(batch));
  }
  const double setup = std::chrono::duration<double>(clock::now() - t0).count();

  for (const auto& m : methods) {
    const auto start = clock::now();
    MethodTrial r;
    Vector xt;
    if (!m.method) {
      xt = obs_fact.solve(b);
    } else {
      const auto spec = m.spec(M, options.power_tol, options.power_max_iter);
      try {
        const auto est = estimate(*prepared, spec, &b);
        r.beta = est.beta;
        xt = augmented_solve(obs_fact, spec, est.beta, b);
      } catch (const Error& e) {
        throw Error(e.code(), fmt::format("{}: {}", m.tag(), e.what()));
      }
    }
    const Vector e = xt - x;
    r.l2_err = e.squaredNorm();
    r.energy_err = e.dot(instance.truth.apply(e));
    r.seconds = std::chrono::duration<double>(clock::now() - start).count();
    if (m.method) r.seconds += setup;
    out.methods.push_back(r);
  }
  return out;
}

const ReportRow& BenchmarkReport::row(const MethodSpec& m) const {
  for (const auto& r : rows) {
    if (r.method == m) return r;
  }
  throw Error(ErrorCode::InvalidSpec, fmt::format("no report row for '{}'", m.tag()));
}

BenchmarkReport aggregate(std::span<const TrialResult> trials, std::span<const MethodSpec> methods) {
  if (trials.size() < 2) throw Error(ErrorCode::InsufficientTrials, "need at least 2 trials");
  BenchmarkReport report;
  report.trials = trials.size();
  std::vector<double> l2_ref, en_ref;
  for (const auto& t : trials) {
    l2_ref.push_back(t.l2_ref);
    en_ref.push_back(t.energy_ref);
  }
  for (std::size_t j = 0; j < methods.size(); ++j) {
    std::vector<double> l2, en;
    ReportRow row;
    row.method = methods[j];
    for (const auto& t : trials) {
      if (t.methods.size() != methods.size()) throw Error(ErrorCode::DimensionMismatch, "trial method count");
      l2.push_back(t.methods[j].l2_err);
      en.push_back(t.methods[j].energy_err);
      row.seconds += t.methods[j].seconds;
      row.mean_beta += t.methods[j].beta;
    }
    row.mean_beta /= trials.size();
    const auto a = ratio_of_means(l2, l2_ref);
    const auto b = ratio_of_means(en, en_ref);
    row.r_mse = a.value;
    row.r_mse_2sigma = a.two_sigma;
    row.r_emse = b.value;
    row.r_emse_2sigma = b.two_sigma;
    report.rows.push_back(row);
  }
  return report;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  if (config.trials < 2) throw Error(ErrorCode::ConfigError, "trials must be >= 2");
  if (config.samples < 2) throw Error(ErrorCode::ConfigError, "samples must be >= 2");
  const auto methods = config.methods.empty()
                           ? default_methods(config.problem == ProblemKind::Poisson1D ||
                                             config.problem == ProblemKind::Poisson2D)
                           : config.methods;
  const auto instance = build_problem(config);
  for (const auto& m : methods) {
    if (m.method) m.spec(config.samples, config.power_tol, config.power_max_iter).validate(instance.dim());
  }

  std::vector<TrialResult> results(config.trials);
  std::vector<std::exception_ptr> errors(config.trials);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  const TrialOptions opts{config.power_tol, config.power_max_iter};
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t t = next.fetch_add(1);
      if (t >= config.trials) break;
      try {
        Rng rng = substream(config.seed, t);
        results[t] = run_trial(instance, methods, config.samples, rng, opts);
      } catch (...) {
        errors[t] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(config.trials)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  auto report = aggregate(results, methods);
  report.problem = instance.name;
  report.noise = config.noise.describe();
  report.seed = config.seed;
  report.samples = config.samples;
  return report;
}

std::string to_csv(const BenchmarkReport& report, bool timing) {
  std::string out = "method,order,window,r_mse,r_mse_2sigma,r_emse,r_emse_2sigma,seconds\n";
  for (const auto& r : report.rows) {
    const std::string order = r.method.order > 0 ? std::to_string(r.method.order) : "";
    const std::string secs = timing ? fmt::format("{:.3f}", r.seconds) : "NA";
    out += fmt::format("{},{},{},{:.10g},{:.10g},{:.10g},{:.10g},{}\n", r.method.tag(), order,
                       r.method.window_label(), r.r_mse, r.r_mse_2sigma, r.r_emse, r.r_emse_2sigma, secs);
  }
  return out;
}

namespace {

std::string percent(double v) { return fmt::format("{:.3g}%", 100.0 * v); }

}  // namespace

std::string to_markdown(const BenchmarkReport& report) {
  std::string out = fmt::format("{} | noise {} | T = {} | M = {} | seed {}\n\n", report.problem, report.noise,
                                report.trials, report.samples, report.seed);
  out += "| Method | Order | Window | R. MSE | ±2σ | R. EMSE | ±2σ |\n";
  out += "|---:|:---:|:---:|---|---|---|---|\n";
  for (const auto& r : report.rows) {
    const auto& m = r.method;
    std::string window = "---";
    if (m.method == Method::TEAGSoft) window = "Soft";
    if (m.method == Method::TEAGHard) window = "Hard";
    out += fmt::format("| **{}** | {} | {} | {} | ±{} | {} | ±{} |\n", m.display_name(),
                       m.order > 0 ? std::to_string(m.order) : "---", window, percent(r.r_mse),
                       percent(r.r_mse_2sigma), percent(r.r_emse), percent(r.r_emse_2sigma));
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += fmt::format(".tmp{}", std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw Error(ErrorCode::IoError, fmt::format("write failed for '{}'", tmp.string()));
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace opaug
