#pragma once

#include <functional>
#include <limits>

namespace mediv {

/// One evaluation of the constrained mean as a function of the multiplier.
/// `derivative` is the variance of the constrained quantity under the tilted
/// posterior, so the mean is a nondecreasing function of beta. `value_stderr`
/// is the Monte Carlo standard error of `value` (0 for exact backends); `ess`
/// is the effective sample size when the backend has one.
struct ObjectiveEval {
  double value = 0.0;
  double derivative = 0.0;
  double value_stderr = 0.0;
  double ess = std::numeric_limits<double>::quiet_NaN();
};

struct SolverConfig {
  double tolerance = 1e-8;
  int max_iterations = 200;
  double initial_bracket_halfwidth = 1.0;
  double initial_guess = 0.0;

  static SolverConfig monte_carlo() {
    SolverConfig c;
    c.tolerance = 1e-4;
    return c;
  }
};

struct BetaSolution {
  double beta = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool converged = false;
  double ess_at_solution = std::numeric_limits<double>::quiet_NaN();
  // Residual tolerance actually applied; exceeds the configured tolerance
  // when the Monte Carlo noise floor forces a clamp.
  double effective_tolerance = 0.0;
  bool tolerance_clamped = false;
};

using Objective = std::function<ObjectiveEval(double)>;

/// Solves mean(beta) = target for a nondecreasing mean function: geometric
/// bracket expansion, then Newton steps safeguarded by bisection (a Newton
/// step leaving the bracket is discarded in favor of the midpoint).
///
/// Throws UnattainableTarget when the bracket guard (|beta| = 1e6) is reached
/// without a sign change, StalledAtDegenerate when the variance is below
/// 1e-14 everywhere yet the residual stays above tolerance. Exhausting
/// max_iterations returns the best iterate with converged = false.
BetaSolution solve_beta(const Objective& objective, double target, const SolverConfig& config = {});

}  // namespace mediv
