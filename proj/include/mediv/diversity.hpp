#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mediv/simplex.hpp"

namespace mediv {

struct SamplingConfig {
  std::size_t n_samples = 1'000'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double tolerance = 1e-4;  // moment residual, Monte Carlo backend
  int max_iterations = 200;
};

/// All values in nats. s_me is stored as log_zeta - beta * target_f, so the
/// identity holds exactly as written. s_me behaves like a differential
/// entropy and is typically negative.
struct DiversityReport {
  double s_traditional = 0.0;
  double simpson = 0.0;             // concentration, sum of squared frequencies
  double simpson_complement = 0.0;  // 1 - concentration
  double s_me = 0.0;
  double beta = 0.0;
  double log_zeta = 0.0;
  double target_f = 0.0;
  bool has_constraint = false;
  std::vector<double> posterior_means;
  std::vector<double> posterior_stderrs;
  double ess = 0.0;
  double stderr_log_zeta = 0.0;
  double stderr_f_mean = 0.0;
  int solver_iterations = 0;
  bool solver_converged = true;
  double solver_residual = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> notes;
};

/// Frequency caveat attached to the traditional measure in reports.
extern const char* const kFrequencyCaveat;

/// -sum_i (m_i/n) log(m_i/n) in nats; zero-count species contribute nothing.
double shannon(const SpeciesCounts& counts);

/// Concentration form sum_i (m_i/n)^2.
double simpson(const SpeciesCounts& counts);

/// Full pipeline: draw a sample bank, solve the multiplier for the constraint
/// (if any), and report s_me = log zeta(beta) - beta * target alongside the
/// frequency-based measures. Without a constraint beta is exactly 0.
DiversityReport me_diversity(const SpeciesCounts& counts, const PriorSpec& prior,
                             const std::optional<LinearMoment>& constraint,
                             const SamplingConfig& config);

}  // namespace mediv
