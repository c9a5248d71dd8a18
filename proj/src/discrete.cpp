#include "mediv/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mediv/errors.hpp"
#include "mediv/logspace.hpp"
#include "mediv/solver.hpp"

namespace mediv {
namespace {

// prior(t) * likelihood[observed][t]; throws if the evidence is identically 0.
std::vector<double> evidence_slice(const DiscreteModel& model, std::size_t observed) {
  if (observed >= model.outcome_count())
    throw InvalidOutcome("unknown outcome id " + std::to_string(observed));
  const auto& prior = model.prior();
  const auto& row = model.likelihood()[observed];
  std::vector<double> w(prior.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    w[i] = prior[i] * row[i];
    sum += w[i];
  }
  if (!(sum > 0.0))
    throw ZeroEvidence("observed outcome has zero probability under every grid point");
  return w;
}

struct TiltedStats {
  double mean = 0.0;
  double variance = 0.0;
  double log_zeta = 0.0;
};

TiltedStats tilted_stats(const std::vector<double>& log_w0, const std::vector<std::size_t>& support,
                         const std::vector<double>& f, double beta) {
  double shift = kNegInf;
  for (std::size_t i : support) shift = std::max(shift, log_w0[i] + beta * f[i]);
  double sw = 0.0;
  double swf = 0.0;
  for (std::size_t i : support) {
    const double w = std::exp(log_w0[i] + beta * f[i] - shift);
    sw += w;
    swf += w * f[i];
  }
  TiltedStats st;
  st.mean = swf / sw;
  double swd = 0.0;
  for (std::size_t i : support) {
    const double w = std::exp(log_w0[i] + beta * f[i] - shift);
    const double d = f[i] - st.mean;
    swd += w * d * d;
  }
  st.variance = swd / sw;
  st.log_zeta = shift + std::log(sw);
  return st;
}

}  // namespace

DiscreteModel::DiscreteModel(std::vector<double> prior_weights,
                             std::vector<std::vector<double>> likelihood,
                             std::vector<std::string> labels)
    : prior_(std::move(prior_weights)), likelihood_(std::move(likelihood)), labels_(std::move(labels)) {
  if (prior_.empty()) throw std::invalid_argument("parameter grid must be non-empty");
  if (likelihood_.empty()) throw std::invalid_argument("outcome set must be non-empty");
  double sum = 0.0;
  for (double w : prior_) {
    if (!std::isfinite(w) || w < 0.0)
      throw std::invalid_argument("prior weights must be finite and nonnegative");
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("prior weights must not all be zero");
  for (double& w : prior_) w /= sum;
  for (const auto& row : likelihood_) {
    if (row.size() != prior_.size())
      throw DimensionMismatch("likelihood row length differs from grid size");
    for (double v : row)
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("likelihood entries must be finite and nonnegative");
  }
  for (std::size_t t = 0; t < prior_.size(); ++t) {
    double s = 0.0;
    for (const auto& row : likelihood_) s += row[t];
    if (std::abs(s - 1.0) > 1e-9)
      throw std::invalid_argument("likelihood over outcomes must sum to 1 at grid point " +
                                  std::to_string(t));
  }
  if (!labels_.empty() && labels_.size() != prior_.size())
    throw DimensionMismatch("label count differs from grid size");
}

DiscretePosterior bayes_update(const DiscreteModel& model, std::size_t observed) {
  const std::vector<double> w = evidence_slice(model, observed);
  double sum = 0.0;
  for (double v : w) sum += v;
  DiscretePosterior post;
  post.weights.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) post.weights[i] = w[i] / sum;
  post.beta = 0.0;
  post.log_zeta = std::log(sum);
  post.residual = 0.0;
  return post;
}

DiscretePosterior me_update(const DiscreteModel& model, std::size_t observed,
                            const std::optional<GridMoment>& moment, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const std::vector<double> w0 = evidence_slice(model, observed);
  const std::size_t n = w0.size();

  std::vector<double> log_w0(n, kNegInf);
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < n; ++i) {
    if (w0[i] > 0.0) {
      log_w0[i] = std::log(w0[i]);
      support.push_back(i);
    }
  }

  std::vector<double> f(n, 0.0);
  double beta = 0.0;
  double residual = 0.0;
  if (moment) {
    if (moment->f_values.size() != n)
      throw DimensionMismatch("constraint length differs from grid size");
    for (double v : moment->f_values)
      if (!std::isfinite(v)) throw std::invalid_argument("constraint values must be finite");
    f = moment->f_values;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i : support) {
      lo = std::min(lo, f[i]);
      hi = std::max(hi, f[i]);
    }
    const double target = moment->target;
    if (!std::isfinite(target)) throw std::invalid_argument("constraint target must be finite");
    if (hi == lo) {
      // Constant f on the support: every beta gives the same mean. beta = 0
      // is the minimal update when the target already matches.
      if (!(std::abs(target - lo) <= tol))
        throw DegenerateConstraint("constraint function is constant on the support (" +
                                   std::to_string(lo) + ") and cannot reach target " +
                                   std::to_string(target));
      residual = std::abs(target - lo);
    } else if (!(target > lo && target < hi)) {
      throw UnattainableTarget(target, lo, hi);
    } else {
      SolverConfig cfg;
      cfg.tolerance = tol;
      const BetaSolution sol = solve_beta(
          [&](double b) {
            const TiltedStats st = tilted_stats(log_w0, support, f, b);
            return ObjectiveEval{st.mean, st.variance, 0.0,
                                 std::numeric_limits<double>::quiet_NaN()};
          },
          target, cfg);
      beta = sol.beta;
      residual = sol.residual;
    }
  }

  double shift = kNegInf;
  for (std::size_t i : support) shift = std::max(shift, log_w0[i] + beta * f[i]);
  DiscretePosterior post;
  post.weights.assign(n, 0.0);
  double sw = 0.0;
  for (std::size_t i : support) {
    post.weights[i] = std::exp(log_w0[i] + beta * f[i] - shift);
    sw += post.weights[i];
  }
  for (std::size_t i : support) post.weights[i] /= sw;
  post.beta = beta;
  post.log_zeta = shift + std::log(sw);
  post.residual = residual;
  return post;
}

DiscretePosterior me_update(const DiscreteModel& model, std::size_t observed,
                            const GridMoment& moment, double tol) {
  return me_update(model, observed, std::optional<GridMoment>(moment), tol);
}

std::pair<double, double> attainable_range(const DiscreteModel& model, std::size_t observed,
                                           const std::vector<double>& f_values) {
  if (f_values.size() != model.grid_size())
    throw DimensionMismatch("constraint length differs from grid size");
  const std::vector<double> w = evidence_slice(model, observed);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) {
      lo = std::min(lo, f_values[i]);
      hi = std::max(hi, f_values[i]);
    }
  }
  return {lo, hi};
}

}  // namespace mediv
