#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "opaug/graph.hpp"
#include "opaug/linalg.hpp"
#include "opaug/random.hpp"

namespace opaug {

enum class NoiseTag { TwoPoint, Gamma, BernoulliKeep };

/// Multiplicative edge noise ẑ: ŵₑ = ẑₑ ωₑ.
struct NoiseModel {
  NoiseTag tag = NoiseTag::TwoPoint;
  double first = 1.0;   // two-point low | gamma mean | keep probability
  double second = 1.0;  // two-point high | gamma std

  static NoiseModel two_point(double low, double high);
  static NoiseModel gamma(double mean, double std);
  static NoiseModel bernoulli(double keep);
  static NoiseModel degenerate() { return two_point(1.0, 1.0); }
  /// `two-point:LOW,HIGH`, `gamma:MEAN,STD`, `bernoulli:P`, `none`.
  static NoiseModel parse(std::string_view text);

  std::string describe() const;
  bool is_degenerate() const;
  double mean() const;
  double draw(Rng& rng) const;
};

/// p_ω together with ℳ: weights → operator.
class MatrixFamily {
 public:
  MatrixFamily(NoiseModel noise, std::shared_ptr<const LaplacianMap> map);
  /// One interior vertex tied to the boundary by one edge, so ℳ(ω) = [ω].
  static MatrixFamily scalar(NoiseModel noise);

  const NoiseModel& noise() const { return noise_; }
  const LaplacianMap& map() const { return *map_; }
  std::shared_ptr<const LaplacianMap> map_ptr() const { return map_; }
  std::size_t edge_count() const { return map_->edge_count(); }

  SpdOperator assemble(const ParameterVector& omega) const;
  ParameterVector perturb(const ParameterVector& omega, Rng& rng) const;

 private:
  NoiseModel noise_;
  std::shared_ptr<const LaplacianMap> map_;
};

struct Observation {
  ParameterVector omega_hat;
  SpdOperator op;
};

Observation sample(const MatrixFamily& family, const ParameterVector& omega, Rng& rng);
SpdOperator bootstrap_sample(const MatrixFamily& family, const ParameterVector& omega_hat, Rng& rng);

class DiscreteEnsemble {
 public:
  struct Outcome {
    double probability;
    SpdOperator op;
  };
  explicit DiscreteEnsemble(std::vector<Outcome> outcomes);

  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  std::size_t size() const { return outcomes_.size(); }
  Eigen::Index dim() const { return outcomes_.front().op.dim(); }
  Matrix mean() const;

 private:
  std::vector<Outcome> outcomes_;
};

DiscreteEnsemble make_discrete(const MatrixFamily& family, const ParameterVector& omega);

}  // namespace opaug
