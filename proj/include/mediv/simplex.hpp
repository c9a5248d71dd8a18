#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mediv {

/// Observed counts per species. Zero counts are legal: a species can be known
/// to be present without having been seen in the sample. At least two species
/// are required.
class SpeciesCounts {
 public:
  SpeciesCounts(std::vector<std::string> labels, std::vector<std::uint64_t> counts);

  std::size_t size() const noexcept { return counts_.size(); }
  std::uint64_t total() const noexcept { return total_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  bool same_counts(const SpeciesCounts& other) const noexcept { return counts_ == other.counts_; }

 private:
  std::vector<std::string> labels_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Linear moment constraint <sum_i coefficients[i] * p_i> = target.
struct LinearMoment {
  std::vector<double> coefficients;
  double target = 0.0;
};

/// Dirichlet concentration per species. All ones is the flat default and is
/// treated as the constant density 1 on the simplex; other concentrations use
/// the Dirichlet density relative to that uniform baseline, so log zeta is
/// continuous in alpha.
struct PriorSpec {
  std::vector<double> concentration;

  static PriorSpec flat(std::size_t k) { return PriorSpec{std::vector<double>(k, 1.0)}; }
  bool is_flat() const noexcept;
};

/// Partition-function evaluation at one beta. dlog_dbeta is the tilted mean
/// of f.p (the constrained expectation), d2log_dbeta2 its tilted variance.
struct ZetaEstimate {
  double log_zeta = 0.0;
  double dlog_dbeta = 0.0;
  double d2log_dbeta2 = 0.0;
  double stderr_log_zeta = 0.0;
  double stderr_dlog_dbeta = 0.0;
  double ess = 0.0;
  std::size_t samples_used = 0;
};

struct MeansEstimate {
  std::vector<double> means;
  std::vector<double> stderrs;
  double ess = 0.0;
};

/// Fixed set of simplex draws from the beta = 0 posterior Dirichlet(m+alpha),
/// reused for every beta (common random numbers), so anything evaluated on it
/// is a smooth deterministic function of beta.
class SampleBank {
 public:
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t species_count() const noexcept { return k_; }
  std::span<const double> draw(std::size_t j) const { return {data_.data() + j * k_, k_}; }
  std::span<const double> draws() const noexcept { return data_; }
  const SpeciesCounts& counts() const { return *counts_; }
  const PriorSpec& prior() const noexcept { return prior_; }

 private:
  friend SampleBank draw_bank(const SpeciesCounts&, const PriorSpec&, std::size_t, std::uint64_t,
                              unsigned);
  SampleBank() = default;

  std::optional<SpeciesCounts> counts_;
  PriorSpec prior_;
  std::uint64_t seed_ = 0;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<double> data_;  // row-major, n_ x k_
};

/// log of the multinomial pmf at p; -inf when some p_i = 0 with counts[i] > 0.
double log_multinomial(const SpeciesCounts& counts, std::span<const double> p);

/// Draws n_samples points from Dirichlet(counts + concentration) via
/// per-coordinate gamma variates. Deterministic given (seed, n_samples) and
/// independent of the thread count: draws are produced in fixed-size chunks
/// whose streams are seeded from (seed, chunk index).
SampleBank draw_bank(const SpeciesCounts& counts, const PriorSpec& prior, std::size_t n_samples,
                     std::uint64_t seed, unsigned threads = 1);

/// log zeta(beta) and its first two beta-derivatives on a fixed bank. The
/// beta = 0 value reduces exactly to the closed form computed with log-gamma
/// (the tilt weights are identically 1), so it carries zero standard error.
ZetaEstimate zeta_at(const SampleBank& bank, const SpeciesCounts& counts,
                     const std::vector<double>& f, double beta);

/// Self-normalized importance estimates of <p_i> under the tilted posterior;
/// the components sum to 1 up to rounding.
MeansEstimate posterior_means(const SampleBank& bank, const SpeciesCounts& counts,
                              const std::vector<double>& f, double beta);

/// Deterministic quadrature baseline for k in {2,3}: composite trapezoid on
/// the segment, vertex-rule triangulation on the triangle. Cost grows as
/// resolution^(k-1). Returns stderr 0.
ZetaEstimate grid_oracle(const SpeciesCounts& counts, const PriorSpec& prior,
                         const std::vector<double>& f, double beta, std::size_t resolution);

/// <p_i> under the tilted posterior from the same quadrature.
std::vector<double> grid_oracle_means(const SpeciesCounts& counts, const PriorSpec& prior,
                                      const std::vector<double>& f, double beta,
                                      std::size_t resolution);

}  // namespace mediv
