#include "opaug/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "opaug/error.hpp"
#include "opaug/evaluation.hpp"
#include "opaug/oracle.hpp"

namespace opaug {

namespace {

const char* const kFooter = R"(methods (--methods, comma separated):
  naive       plain solve with the observed operator
  basic       scalar shrinkage of the right-hand side norm
  ag          augmentation in the L2 norm
  eag         augmentation in the energy norm
  teag-s:K    truncated Taylor, soft window, even order K
  teag-h:K    truncated Taylor, hard window, even order K
  asteag:K    shifted truncated Taylor, order K
noise (--noise):
  two-point:a,b   edge weight scaled by a or b with equal probability
  gamma:m,s       edge weight scaled by a Gamma variable with mean m, std s
  bernoulli:p     edge kept with probability p and rescaled by 1/p
  none            no noise
oracle cases: scalar-two-point, diag-two-point
environment: OPAUG_THREADS sets the default --threads)";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// key = value lines; '#' starts a comment. Fills options not already given on the command line.
void apply_config_file(CLI::App& app, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, fmt::format("cannot read config '{}'", path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: expected key = value", path, lineno));
    }
    const auto key = trim(std::string_view(text).substr(0, eq));
    const auto value = trim(std::string_view(text).substr(eq + 1));
    CLI::Option* opt = nullptr;
    if (!key.empty() && key != "config" && key != "help") {
      try {
        opt = app.get_option("--" + key);
      } catch (const CLI::OptionNotFound&) {
      }
    }
    if (opt == nullptr) throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: unknown key '{}'", path, lineno, key));
    if (opt->count() > 0) continue;
    try {
      if (opt->get_type_size() == 0) {
        if (value == "true" || value == "1") opt->add_result("true");
      } else {
        opt->add_result(value);
      }
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: {}", path, lineno, e.what()));
    }
  }
}

/// Errors raised while validating inputs, before any computation.
bool is_config_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::ParseError:
    case ErrorCode::SelfLoop:
    case ErrorCode::EmptyGraph:
    case ErrorCode::InvalidSize:
    case ErrorCode::InvalidShift:
    case ErrorCode::InvalidOrder:
    case ErrorCode::InvalidSpec:
      return true;
    default:
      return false;
  }
}

unsigned default_threads() {
  if (const char* env = std::getenv("OPAUG_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) {
      throw Error(ErrorCode::ConfigError, fmt::format("OPAUG_THREADS must be a positive integer, got '{}'", env));
    }
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string default_noise(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Poisson2D: return "two-point:0.4,1.6";
    case ProblemKind::Sparsify: return "bernoulli:0.75";
    default: return "two-point:0.5,1.5";
  }
}

struct BenchArgs {
  std::string problem;
  std::string noise;
  std::string methods;
  std::string out;
  std::string format;
  std::string config;
  std::string edges;
  bool timing = false;
};

int run_bench(const BenchArgs& args, BenchmarkConfig cfg, std::ostream& out, std::ostream& err) {
  cfg.problem = parse_problem(args.problem);
  cfg.noise = NoiseModel::parse(args.noise.empty() ? default_noise(cfg.problem) : args.noise);
  cfg.edges = args.edges;
  if (!args.methods.empty()) cfg.methods = parse_methods(args.methods);
  if (cfg.threads == 0) throw Error(ErrorCode::ConfigError, "--threads must be >= 1");
  if ((cfg.problem == ProblemKind::Graph || cfg.problem == ProblemKind::Sparsify) && cfg.edges.empty()) {
    throw Error(ErrorCode::ConfigError, fmt::format("{} needs --edges", args.problem));
  }
  std::string format = args.format;
  if (format.empty()) format = args.out.ends_with(".md") ? "md" : "csv";

  const auto report = run_benchmark(cfg);
  const auto text = format == "md" ? to_markdown(report) : to_csv(report, args.timing);
  if (args.out.empty() || args.out == "-") {
    out << text;
  } else {
    write_atomic(args.out, text);
    err << fmt::format("wrote {} ({} rows)\n", args.out, report.rows.size());
  }
  return 0;
}

int run_verify(std::uint64_t seed, std::ostream& out) {
  const auto suites = oracle::run_lemma_suites(seed);
  bool ok = true;
  for (const auto& s : suites) {
    const bool pass = s.failures == 0 && s.instances > s.precondition_skips;
    ok = ok && pass;
    out << fmt::format("{:<22} {:>4} instances  {:>3} skipped  {:>3} failed  worst margin {:.3e}  {}\n", s.name,
                       s.instances, s.precondition_skips, s.failures, s.worst_margin, pass ? "PASS" : "FAIL");
    if (!s.first_failure.empty()) out << "  first failure: " << s.first_failure << "\n";
  }
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operator augmentation benchmarks and exact oracles", "opaug"};
  app.footer(kFooter);
  app.require_subcommand(1);

  BenchmarkConfig cfg;
  BenchArgs args;
  auto* bench = app.add_subcommand("bench", "Run a Monte-Carlo benchmark and emit a report");
  bench->footer(kFooter);
  bench->add_option("problem", args.problem, "poisson1d | poisson2d | graph | sparsify")
      ->required()
      ->check(CLI::IsMember({"poisson1d", "poisson2d", "graph", "sparsify"}));
  bench->add_option("--config", args.config, "key = value file; flags override it");
  bench->add_option("--n", cfg.n, "1D interior grid points")->capture_default_str();
  bench->add_option("--nx", cfg.nx, "2D interior points along x")->capture_default_str();
  bench->add_option("--ny", cfg.ny, "2D interior points along y")->capture_default_str();
  bench->add_option("--edges", args.edges, "edge-list file for graph problems");
  bench->add_option("--boundary", cfg.boundary, "Dirichlet vertices for the graph problem")->capture_default_str();
  bench->add_option("--gamma", cfg.gamma, "diagonal shift for the sparsify problem")->capture_default_str();
  bench->add_option("--noise", args.noise, "noise model, e.g. two-point:0.5,1.5");
  bench->add_option("--methods", args.methods, "comma list of method tags");
  bench->add_option("--trials", cfg.trials, "Monte-Carlo trials T")->capture_default_str();
  bench->add_option("--samples", cfg.samples, "bootstrap samples M per estimate")->capture_default_str();
  bench->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  bench->add_option("--threads", cfg.threads, "worker thread cap");
  bench->add_option("--power-tol", cfg.power_tol, "power-method tolerance")->capture_default_str();
  bench->add_option("--power-iters", cfg.power_max_iter, "power-method iteration cap")->capture_default_str();
  bench->add_option("--out", args.out, "report path (stdout when omitted)");
  bench->add_option("--format", args.format, "csv | md")->check(CLI::IsMember({"csv", "md"}));
  bench->add_flag("--timing", args.timing, "fill the seconds column with wall time");

  std::uint64_t verify_seed = 1;
  std::string verify_what;
  auto* verify = app.add_subcommand("verify", "Randomized checks of the lemmas and chain theorems");
  verify->add_option("what", verify_what, "lemmas")->required()->check(CLI::IsMember({"lemmas"}));
  verify->add_option("--seed", verify_seed, "suite seed")->capture_default_str();

  std::string case_name;
  auto* orc = app.add_subcommand("oracle", "Print exact factors for a named small ensemble");
  orc->add_option("case", case_name, "case name")->required();

  try {
    cfg.threads = default_threads();
    app.parse(argc, argv);
    if (*bench) {
      if (!args.config.empty()) apply_config_file(*bench, args.config);
      return run_bench(args, cfg, out, err);
    }
    if (*verify) return run_verify(verify_seed, out);
    if (*orc) {
      const auto cases = oracle::oracle_cases();
      if (std::find(cases.begin(), cases.end(), case_name) == cases.end()) {
        throw Error(ErrorCode::ConfigError, fmt::format("unknown oracle case '{}'", case_name));
      }
      out << oracle::run_oracle_case(case_name);
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    err << "opaug: " << e.what() << "\n";
    return is_config_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "opaug: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace opaug
