#include "mediv/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mediv/errors.hpp"
#include "mediv/solver.hpp"

namespace mediv {

const char* const kFrequencyCaveat =
    "sample frequencies m_i/n only estimate the underlying species probabilities, and the "
    "estimate is reliable only for large n; the frequency-based measure describes the counted "
    "portion, not the whole community";

double shannon(const SpeciesCounts& counts) {
  if (counts.total() == 0) throw EmptySample("cannot compute diversity of an empty sample");
  const double n = static_cast<double>(counts.total());
  double s = 0.0;
  for (std::uint64_t m : counts.counts()) {
    if (m == 0) continue;  // x log x -> 0
    const double p = static_cast<double>(m) / n;
    s -= p * std::log(p);
  }
  return s;
}

double simpson(const SpeciesCounts& counts) {
  if (counts.total() == 0) throw EmptySample("cannot compute diversity of an empty sample");
  const double n = static_cast<double>(counts.total());
  double s = 0.0;
  for (std::uint64_t m : counts.counts()) {
    const double p = static_cast<double>(m) / n;
    s += p * p;
  }
  return s;
}

DiversityReport me_diversity(const SpeciesCounts& counts, const PriorSpec& prior,
                             const std::optional<LinearMoment>& constraint,
                             const SamplingConfig& config) {
  if (config.n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
  if (!(config.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");

  DiversityReport rep;
  rep.s_traditional = shannon(counts);  // throws EmptySample for n = 0
  rep.simpson = simpson(counts);
  rep.simpson_complement = 1.0 - rep.simpson;
  rep.n_samples = config.n_samples;
  rep.seed = config.seed;

  const std::size_t k = counts.size();
  std::vector<double> f(k, 0.0);
  bool solve = false;
  if (constraint) {
    if (constraint->coefficients.size() != k)
      throw DimensionMismatch("constraint coefficient length differs from species count");
    for (double v : constraint->coefficients)
      if (!std::isfinite(v)) throw std::invalid_argument("constraint coefficients must be finite");
    if (!std::isfinite(constraint->target))
      throw std::invalid_argument("constraint target must be finite");
    rep.has_constraint = true;
    rep.target_f = constraint->target;
    f = constraint->coefficients;
    const auto [lo_it, hi_it] = std::minmax_element(f.begin(), f.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (lo == hi) {
      // f.p is the constant lo on the whole simplex.
      if (!(std::abs(rep.target_f - lo) <= config.tolerance))
        throw DegenerateConstraint("constraint coefficients are constant (" + std::to_string(lo) +
                                   ") and cannot reach target " + std::to_string(rep.target_f));
      rep.notes.push_back("constraint already satisfied at beta = 0; no tilt applied");
    } else if (!(rep.target_f > lo && rep.target_f < hi)) {
      throw UnattainableTarget(rep.target_f, lo, hi);
    } else {
      solve = true;
    }
  }

  const SampleBank bank = draw_bank(counts, prior, config.n_samples, config.seed, config.threads);

  if (solve) {
    SolverConfig sc;
    sc.tolerance = config.tolerance;
    sc.max_iterations = config.max_iterations;
    const BetaSolution sol = solve_beta(
        [&](double b) {
          const ZetaEstimate z = zeta_at(bank, counts, f, b);
          return ObjectiveEval{z.dlog_dbeta, z.d2log_dbeta2, z.stderr_dlog_dbeta, z.ess};
        },
        rep.target_f, sc);
    rep.beta = sol.beta;
    rep.solver_iterations = sol.iterations;
    rep.solver_converged = sol.converged;
    rep.bracket_lo = sol.bracket_lo;
    rep.bracket_hi = sol.bracket_hi;
    if (!sol.converged)
      rep.notes.push_back("solver did not converge within " +
                          std::to_string(config.max_iterations) + " iterations");
    if (sol.tolerance_clamped)
      rep.notes.push_back("moment tolerance clamped to the Monte Carlo noise floor");
  }

  const ZetaEstimate z = zeta_at(bank, counts, f, rep.beta);
  const MeansEstimate means = posterior_means(bank, counts, f, rep.beta);
  rep.log_zeta = z.log_zeta;
  rep.s_me = rep.log_zeta - rep.beta * rep.target_f;
  rep.posterior_means = means.means;
  rep.posterior_stderrs = means.stderrs;
  rep.ess = z.ess;
  rep.stderr_log_zeta = z.stderr_log_zeta;
  rep.stderr_f_mean = z.stderr_dlog_dbeta;
  if (rep.has_constraint) rep.solver_residual = std::abs(z.dlog_dbeta - rep.target_f);
  if (z.ess < 0.01 * static_cast<double>(config.n_samples))
    rep.notes.push_back("effective sample size below 1% of draws; estimates may be unstable");
  return rep;
}

}  // namespace mediv
