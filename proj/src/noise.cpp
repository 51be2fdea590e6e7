#include "opaug/noise.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace opaug {

NoiseModel NoiseModel::two_point(double low, double high) {
  if (!(low > 0.0) || !(high > 0.0) || !std::isfinite(low) || !std::isfinite(high)) {
    throw Error(ErrorCode::InvalidSpec, "two-point multipliers must be positive");
  }
  return {NoiseTag::TwoPoint, low, high};
}

NoiseModel NoiseModel::gamma(double mean, double std) {
  if (!(mean > 0.0) || !(std > 0.0) || !std::isfinite(mean) || !std::isfinite(std)) {
    throw Error(ErrorCode::InvalidSpec, "gamma mean and std must be positive");
  }
  return {NoiseTag::Gamma, mean, std};
}

NoiseModel NoiseModel::bernoulli(double keep) {
  if (!(keep > 0.0) || keep > 1.0) throw Error(ErrorCode::InvalidSpec, "keep probability must be in (0, 1]");
  return {NoiseTag::BernoulliKeep, keep, 0.0};
}

namespace {

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    auto tok = text.substr(0, comma);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw Error(ErrorCode::ConfigError, fmt::format("bad noise parameter '{}'", tok));
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

NoiseModel NoiseModel::parse(std::string_view text) {
  const auto colon = text.find(':');
  const auto tag = text.substr(0, colon);
  if (colon == std::string_view::npos) {
    if (tag == "none" || tag == "degenerate") return degenerate();
    throw Error(ErrorCode::ConfigError, fmt::format("noise '{}' needs parameters (tag:p,q)", text));
  }
  const auto params = parse_numbers(text.substr(colon + 1));
  auto want = [&](std::size_t n) {
    if (params.size() != n) {
      throw Error(ErrorCode::ConfigError,
                  fmt::format("noise '{}' expects {} parameter(s), got {}", tag, n, params.size()));
    }
  };
  try {
    if (tag == "two-point") {
      want(2);
      return two_point(params[0], params[1]);
    }
    if (tag == "gamma") {
      want(2);
      return gamma(params[0], params[1]);
    }
    if (tag == "bernoulli") {
      want(1);
      return bernoulli(params[0]);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, e.what());
  }
  throw Error(ErrorCode::ConfigError, fmt::format("unknown noise tag '{}'", tag));
}

std::string NoiseModel::describe() const {
  switch (tag) {
    case NoiseTag::TwoPoint: return fmt::format("two-point:{},{}", first, second);
    case NoiseTag::Gamma: return fmt::format("gamma:{},{}", first, second);
    case NoiseTag::BernoulliKeep: return fmt::format("bernoulli:{}", first);
  }
  return "?";
}

bool NoiseModel::is_degenerate() const {
  switch (tag) {
    case NoiseTag::TwoPoint: return first == second;
    case NoiseTag::Gamma: return false;
    case NoiseTag::BernoulliKeep: return first == 1.0;
  }
  return false;
}

double NoiseModel::mean() const {
  switch (tag) {
    case NoiseTag::TwoPoint: return 0.5 * (first + second);
    case NoiseTag::Gamma: return first;
    case NoiseTag::BernoulliKeep: return 1.0;
  }
  return 1.0;
}

double NoiseModel::draw(Rng& rng) const {
  switch (tag) {
    case NoiseTag::TwoPoint: return std::bernoulli_distribution(0.5)(rng) ? second : first;
    case NoiseTag::Gamma: {
      const double shape = (first / second) * (first / second);
      const double scale = second * second / first;
      return std::gamma_distribution<double>(shape, scale)(rng);
    }
    case NoiseTag::BernoulliKeep: return std::bernoulli_distribution(first)(rng) ? 1.0 / first : 0.0;
  }
  return 1.0;
}

MatrixFamily::MatrixFamily(NoiseModel noise, std::shared_ptr<const LaplacianMap> map)
    : noise_(noise), map_(std::move(map)) {
  if (!map_) throw Error(ErrorCode::InvalidSpec, "family needs a structure");
}

MatrixFamily MatrixFamily::scalar(NoiseModel noise) {
  auto s = IncidenceStructure::make(2, {{0, 1}}, {1});
  return MatrixFamily(noise, std::make_shared<LaplacianMap>(std::move(s), 0.0));
}

SpdOperator MatrixFamily::assemble(const ParameterVector& omega) const { return map_->assemble(omega); }

ParameterVector MatrixFamily::perturb(const ParameterVector& omega, Rng& rng) const {
  if (omega.size() != map_->edge_count()) {
    throw Error(ErrorCode::StructureMismatch,
                fmt::format("parameter length {} != edge count {}", omega.size(), map_->edge_count()));
  }
  ParameterVector out(omega.size());
  for (std::size_t e = 0; e < omega.size(); ++e) out[e] = noise_.draw(rng) * omega[e];
  return out;
}

Observation sample(const MatrixFamily& family, const ParameterVector& omega, Rng& rng) {
  auto omega_hat = family.perturb(omega, rng);
  auto op = family.assemble(omega_hat);
  return {std::move(omega_hat), std::move(op)};
}

SpdOperator bootstrap_sample(const MatrixFamily& family, const ParameterVector& omega_hat, Rng& rng) {
  return family.assemble(family.perturb(omega_hat, rng));
}

DiscreteEnsemble::DiscreteEnsemble(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
  if (outcomes_.empty()) throw Error(ErrorCode::InvalidSpec, "empty ensemble");
  long double total = 0.0;
  for (const auto& o : outcomes_) {
    if (!(o.probability > 0.0)) throw Error(ErrorCode::InvalidSpec, "ensemble probability must be positive");
    if (o.op.dim() != outcomes_.front().op.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "ensemble operators differ in dimension");
    }
    total += o.probability;
  }
  if (std::abs(static_cast<double>(total) - 1.0) > 1e-12) throw Error(ErrorCode::InvalidSpec, "ensemble probabilities must sum to 1");
}

Matrix DiscreteEnsemble::mean() const {
  Matrix m = Matrix::Zero(dim(), dim());
  for (const auto& o : outcomes_) m += o.probability * o.op.to_dense();
  return m;
}

DiscreteEnsemble make_discrete(const MatrixFamily& family, const ParameterVector& omega) {
  const auto& noise = family.noise();
  if (noise.tag == NoiseTag::Gamma) throw Error(ErrorCode::UnsupportedModel, "gamma noise is continuous");
  const std::size_t edges = family.edge_count();
  if (omega.size() != edges) throw Error(ErrorCode::StructureMismatch, "parameter length");
  if (edges > 20) throw Error(ErrorCode::TooLarge, fmt::format("2^{} outcomes", edges));
  // bit e set: high multiplier (two-point) or kept edge (Bernoulli)
  double p_set = 0.5, z_set = noise.second, z_clear = noise.first;
  if (noise.tag == NoiseTag::BernoulliKeep) {
    p_set = noise.first;
    z_set = 1.0 / noise.first;
    z_clear = 0.0;
  }
  std::vector<DiscreteEnsemble::Outcome> out;
  const std::size_t count = std::size_t{1} << edges;
  for (std::size_t mask = 0; mask < count; ++mask) {
    double prob = 1.0;
    ParameterVector w(edges);
    for (std::size_t e = 0; e < edges; ++e) {
      const bool set = (mask >> e) & 1U;
      prob *= set ? p_set : 1.0 - p_set;
      w[e] = (set ? z_set : z_clear) * omega[e];
    }
    if (prob > 0.0) out.push_back({prob, family.assemble(w)});
  }
  return DiscreteEnsemble(std::move(out));
}

}  // namespace opaug
