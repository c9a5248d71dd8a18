#include <doctest.h>

#include <cmath>
#include <vector>

#include "mediv/errors.hpp"
#include "mediv/solver.hpp"

using mediv::BetaSolution;
using mediv::ObjectiveEval;
using mediv::SolverConfig;
using mediv::solve_beta;

namespace {

// Exact tilted mean/variance for a two-point model with base weights w and
// values f: the same objective the discrete engine feeds the solver.
mediv::Objective two_point_objective(std::vector<double> w, std::vector<double> f) {
  return [w = std::move(w), f = std::move(f)](double beta) {
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.size(); ++i)
      shift = std::max(shift, std::log(w[i]) + beta * f[i]);
    double sw = 0.0;
    double swf = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double t = std::exp(std::log(w[i]) + beta * f[i] - shift);
      sw += t;
      swf += t * f[i];
    }
    const double mean = swf / sw;
    double var = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double t = std::exp(std::log(w[i]) + beta * f[i] - shift);
      var += t * (f[i] - mean) * (f[i] - mean);
    }
    return ObjectiveEval{mean, var / sw, 0.0, std::numeric_limits<double>::quiet_NaN()};
  };
}

}  // namespace

TEST_CASE("two-point closed form: equal tilted weights at beta = -2 ln 3") {
  // weights 0.5*0.25 and 0.5*0.75 with f = (0.25, 0.75); the tilted weights
  // coincide exactly when exp(0.5 beta) = 1/3.
  const auto objective = two_point_objective({0.125, 0.375}, {0.25, 0.75});
  const BetaSolution sol = solve_beta(objective, 0.5);
  CHECK(sol.converged);
  CHECK(std::abs(sol.beta - (-2.0 * std::log(3.0))) < 1e-8);
  CHECK(sol.residual <= 1e-8);
}

TEST_CASE("target equal to the untilted mean returns beta 0 immediately") {
  const auto objective = two_point_objective({0.125, 0.375}, {0.25, 0.75});
  const double mean0 = objective(0.0).value;  // 0.625
  const BetaSolution sol = solve_beta(objective, mean0);
  CHECK(sol.converged);
  CHECK(sol.beta == 0.0);
  CHECK(sol.iterations <= 2);
}

TEST_CASE("idempotence: restarting at the converged beta returns in one evaluation") {
  const auto objective = two_point_objective({0.125, 0.375}, {0.25, 0.75});
  const BetaSolution first = solve_beta(objective, 0.5);
  SolverConfig cfg;
  cfg.initial_guess = first.beta;
  const BetaSolution second = solve_beta(objective, 0.5, cfg);
  CHECK(second.converged);
  CHECK(second.iterations == 1);
  CHECK(second.beta == first.beta);
}

TEST_CASE("final bracket straddles the target") {
  const auto objective = two_point_objective({0.125, 0.375}, {0.25, 0.75});
  const BetaSolution sol = solve_beta(objective, 0.4);
  CHECK(sol.converged);
  CHECK(sol.bracket_lo <= sol.beta);
  CHECK(sol.beta <= sol.bracket_hi);
  CHECK(objective(sol.bracket_lo).value <= 0.4 + 1e-12);
  CHECK(objective(sol.bracket_hi).value >= 0.4 - 1e-12);
}

TEST_CASE("sign of beta follows the side of the untilted mean") {
  const auto objective = two_point_objective({0.2, 0.8}, {-1.0, 2.0});
  const double mean0 = objective(0.0).value;
  CHECK(solve_beta(objective, mean0 + 0.3).beta >= 0.0);
  CHECK(solve_beta(objective, mean0 - 0.3).beta <= 0.0);
}

TEST_CASE("unattainable target trips the bracket guard") {
  const auto objective = two_point_objective({0.5, 0.5}, {0.0, 1.0});
  CHECK_THROWS_AS(solve_beta(objective, 1.5), mediv::UnattainableTarget);
  try {
    solve_beta(objective, 1.5);
  } catch (const mediv::UnattainableTarget& e) {
    CHECK(e.target() == 1.5);
    CHECK(e.hi() <= 1.0);
  }
}

TEST_CASE("constant objective stalls as degenerate") {
  const mediv::Objective constant = [](double) {
    return ObjectiveEval{2.0, 0.0, 0.0, std::numeric_limits<double>::quiet_NaN()};
  };
  CHECK_THROWS_AS(solve_beta(constant, 3.0), mediv::StalledAtDegenerate);
}

TEST_CASE("iteration cap returns best-so-far unconverged") {
  const auto objective = two_point_objective({0.125, 0.375}, {0.25, 0.75});
  SolverConfig cfg;
  cfg.max_iterations = 3;
  cfg.tolerance = 1e-14;
  const BetaSolution sol = solve_beta(objective, 0.3, cfg);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations == 3);
  CHECK(std::isfinite(sol.beta));
}

TEST_CASE("Monte Carlo noise floor clamps the tolerance") {
  // Pretend backend with a 1e-2 standard error on the mean.
  const mediv::Objective noisy = [](double beta) {
    const double mean = std::tanh(beta);
    const double var = 1.0 - mean * mean;
    return ObjectiveEval{mean, var, 1e-2, 500.0};
  };
  SolverConfig cfg;
  cfg.tolerance = 1e-10;
  const BetaSolution sol = solve_beta(noisy, 0.5, cfg);
  CHECK(sol.converged);
  CHECK(sol.tolerance_clamped);
  CHECK(sol.effective_tolerance >= 1e-2);
  CHECK(sol.residual <= sol.effective_tolerance);
  CHECK(sol.ess_at_solution == 500.0);
}

TEST_CASE("config validation") {
  const auto objective = two_point_objective({0.5, 0.5}, {0.0, 1.0});
  SolverConfig bad;
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(solve_beta(objective, 0.5, bad), std::invalid_argument);
  bad = SolverConfig{};
  bad.max_iterations = 0;
  CHECK_THROWS_AS(solve_beta(objective, 0.5, bad), std::invalid_argument);
  CHECK_THROWS_AS(solve_beta(objective, std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}
