#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mediv {

/// Finite/gridded inference problem: a prior over grid points and a
/// conditional outcome table. The constructor normalizes the prior; each
/// grid point's likelihood over outcomes must sum to 1 within 1e-9.
class DiscreteModel {
 public:
  /// `likelihood[x][t]` is the probability of outcome x at grid point t.
  DiscreteModel(std::vector<double> prior_weights, std::vector<std::vector<double>> likelihood,
                std::vector<std::string> labels = {});

  std::size_t grid_size() const noexcept { return prior_.size(); }
  std::size_t outcome_count() const noexcept { return likelihood_.size(); }
  const std::vector<double>& prior() const noexcept { return prior_; }
  const std::vector<std::vector<double>>& likelihood() const noexcept { return likelihood_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::vector<double> prior_;
  std::vector<std::vector<double>> likelihood_;  // [outcome][grid point]
  std::vector<std::string> labels_;
};

/// Expected-value constraint <f> = target with one value of f per grid point.
struct GridMoment {
  std::vector<double> f_values;
  double target = 0.0;
};

struct DiscretePosterior {
  std::vector<double> weights;  // sum to 1; exactly 0 off the support
  double beta = 0.0;
  double log_zeta = 0.0;
  double residual = 0.0;  // |<f> - target| achieved (0 without a constraint)
};

/// Conditions on one observed outcome: weights proportional to
/// prior * likelihood[observed]. log_zeta is the log normalizer.
DiscretePosterior bayes_update(const DiscreteModel& model, std::size_t observed);

/// Simultaneous update on observed data and a moment constraint: weights
/// proportional to prior * likelihood[observed] * exp(beta * f), with beta
/// solved so the posterior mean of f hits the target within tol. Without a
/// constraint this runs the same log-domain pipeline at beta = 0 and
/// reproduces bayes_update.
DiscretePosterior me_update(const DiscreteModel& model, std::size_t observed,
                            const std::optional<GridMoment>& moment, double tol = 1e-10);
DiscretePosterior me_update(const DiscreteModel& model, std::size_t observed,
                            const GridMoment& moment, double tol = 1e-10);

/// (min, max) of f over grid points with positive Bayes-posterior weight.
/// Targets strictly inside the interval are solvable; an endpoint only when
/// f is constant on the support.
std::pair<double, double> attainable_range(const DiscreteModel& model, std::size_t observed,
                                           const std::vector<double>& f_values);

}  // namespace mediv
