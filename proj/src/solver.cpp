#include "mediv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mediv/errors.hpp"

namespace mediv {
namespace {

constexpr double kBetaGuard = 1e6;
constexpr double kVarianceFloor = 1e-14;

}  // namespace

BetaSolution solve_beta(const Objective& objective, double target, const SolverConfig& config) {
  if (!(config.tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (!(config.initial_bracket_halfwidth > 0.0))
    throw std::invalid_argument("initial_bracket_halfwidth must be positive");
  if (!std::isfinite(target)) throw std::invalid_argument("moment target must be finite");
  if (!std::isfinite(config.initial_guess)) throw std::invalid_argument("initial_guess must be finite");

  int evals = 0;
  double max_variance = 0.0;
  double min_value = std::numeric_limits<double>::infinity();
  double max_value = -std::numeric_limits<double>::infinity();
  bool clamped = false;

  auto eval = [&](double beta) {
    ++evals;
    ObjectiveEval e = objective(beta);
    if (!std::isfinite(e.value))
      throw NumericalOverflow("objective returned a non-finite mean at beta=" + std::to_string(beta));
    max_variance = std::max(max_variance, e.derivative);
    min_value = std::min(min_value, e.value);
    max_value = std::max(max_value, e.value);
    if (e.value_stderr > config.tolerance) clamped = true;
    return e;
  };
  auto tol_at = [&](const ObjectiveEval& e) { return std::max(config.tolerance, e.value_stderr); };

  BetaSolution best;
  best.residual = std::numeric_limits<double>::infinity();
  auto note_best = [&](double beta, const ObjectiveEval& e, double lo, double hi) {
    const double r = std::abs(e.value - target);
    if (r < best.residual) {
      best.beta = beta;
      best.residual = r;
      best.ess_at_solution = e.ess;
      best.bracket_lo = lo;
      best.bracket_hi = hi;
      best.effective_tolerance = tol_at(e);
    }
  };
  auto accept = [&](double beta, const ObjectiveEval& e, double lo, double hi) {
    best.beta = beta;
    best.residual = std::abs(e.value - target);
    best.ess_at_solution = e.ess;
    best.bracket_lo = lo;
    best.bracket_hi = hi;
    best.effective_tolerance = tol_at(e);
  };
  auto finish = [&](bool converged) {
    best.iterations = evals;
    best.converged = converged;
    best.tolerance_clamped = clamped;
    return best;
  };

  const double guess = config.initial_guess;
  ObjectiveEval e0 = eval(guess);
  note_best(guess, e0, guess, guess);
  if (std::abs(e0.value - target) <= tol_at(e0)) {
    accept(guess, e0, guess, guess);
    return finish(true);
  }

  // Expand a bracket in the direction the mean must move.
  const bool up = target > e0.value;
  double near_beta = guess;
  double far_beta = guess;
  ObjectiveEval far_eval = e0;
  double halfwidth = config.initial_bracket_halfwidth;
  bool bracketed = false;
  while (!bracketed) {
    if (evals >= config.max_iterations) return finish(false);
    near_beta = far_beta;
    far_beta = up ? guess + halfwidth : guess - halfwidth;
    if (std::abs(far_beta) > kBetaGuard) {
      if (max_variance < kVarianceFloor)
        throw StalledAtDegenerate(
            "constrained quantity has zero variance; no multiplier can move its mean to " +
            std::to_string(target));
      throw UnattainableTarget(target, min_value, max_value);
    }
    far_eval = eval(far_beta);
    note_best(far_beta, far_eval, std::min(near_beta, far_beta), std::max(near_beta, far_beta));
    if (std::abs(far_eval.value - target) <= tol_at(far_eval)) {
      accept(far_beta, far_eval, std::min(near_beta, far_beta), std::max(near_beta, far_beta));
      return finish(true);
    }
    bracketed = up ? (far_eval.value >= target) : (far_eval.value <= target);
    halfwidth *= 2.0;
  }

  // Orient so that value(lo) <= target <= value(hi); the mean is
  // nondecreasing, so lo < hi implies value(lo) <= value(hi).
  double lo = std::min(near_beta, far_beta);
  double hi = std::max(near_beta, far_beta);
  double x = far_beta;
  ObjectiveEval ex = far_eval;
  while (evals < config.max_iterations) {
    double next = 0.5 * (lo + hi);
    if (ex.derivative > 0.0 && std::isfinite(ex.derivative)) {
      const double newton = x - (ex.value - target) / ex.derivative;
      if (std::isfinite(newton) && newton > lo && newton < hi) next = newton;
    }
    ObjectiveEval en = eval(next);
    note_best(next, en, lo, hi);
    if (std::abs(en.value - target) <= tol_at(en)) {
      accept(next, en, lo, hi);
      return finish(true);
    }
    if (en.value < target)
      lo = next;
    else
      hi = next;
    x = next;
    ex = en;
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi))) {
      if (max_variance < kVarianceFloor)
        throw StalledAtDegenerate(
            "constrained quantity has zero variance; no multiplier can move its mean to " +
            std::to_string(target));
      return finish(best.residual <= best.effective_tolerance);
    }
  }
  return finish(false);
}

}  // namespace mediv
