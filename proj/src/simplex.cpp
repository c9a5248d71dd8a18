#include "mediv/simplex.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "mediv/errors.hpp"
#include "mediv/logspace.hpp"

namespace mediv {
namespace {

constexpr std::size_t kChunkSize = 16384;

double log_beta_function(const std::vector<double>& v) {
  double sum = 0.0;
  double lg = 0.0;
  for (double a : v) {
    sum += a;
    lg += std::lgamma(a);
  }
  return lg - std::lgamma(sum);
}

// zeta(beta) = C * E_bank[exp(beta f.p)]; this is log C. For the flat prior
// it is exactly log(n! / (n+k-1)!); the general form coincides with it at
// alpha = 1 because the prior density is taken relative to the uniform one.
double log_zeta_constant(const SpeciesCounts& counts, const PriorSpec& prior) {
  const double n = static_cast<double>(counts.total());
  const double k = static_cast<double>(counts.size());
  if (prior.is_flat()) return std::lgamma(n + 1.0) - std::lgamma(n + k);
  double log_coef = std::lgamma(n + 1.0);
  std::vector<double> posterior(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double m = static_cast<double>(counts.counts()[i]);
    log_coef -= std::lgamma(m + 1.0);
    posterior[i] = m + prior.concentration[i];
  }
  return log_coef + log_beta_function(posterior) -
         (std::lgamma(k) + log_beta_function(prior.concentration));
}

void check_prior(const SpeciesCounts& counts, const PriorSpec& prior) {
  if (prior.concentration.size() != counts.size())
    throw DimensionMismatch("prior concentration length differs from species count");
  for (double a : prior.concentration)
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("prior concentrations must be positive and finite");
}

void check_constraint(const SpeciesCounts& counts, const std::vector<double>& f) {
  if (f.size() != counts.size())
    throw DimensionMismatch("constraint coefficient length differs from species count");
  for (double v : f)
    if (!std::isfinite(v)) throw std::invalid_argument("constraint coefficients must be finite");
}

struct WeightedStats {
  double sum_w = 0.0;      // sum of shifted tilt weights
  double mean_s = 0.0;     // weighted mean of f.p
  double var_s = 0.0;      // weighted variance of f.p
  double stderr_s = 0.0;   // self-normalized IS standard error of mean_s
  double ess = 0.0;
  double shift = 0.0;      // max of beta * f.p
};

// Tilt weights w_j = exp(beta s_j - shift) and weighted moments of s.
WeightedStats tilt_weights(const std::vector<double>& s, double beta, std::vector<double>& w) {
  const std::size_t n = s.size();
  double shift = kNegInf;
  for (double v : s) {
    const double u = beta * v;
    if (std::isnan(u)) throw NumericalOverflow("tilt exponent is NaN");
    shift = std::max(shift, u);
  }
  if (!std::isfinite(shift)) throw NumericalOverflow("tilt exponent overflows the log domain");
  w.resize(n);
  double sw = 0.0;
  double sws = 0.0;
  double sww = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = std::exp(beta * s[j] - shift);
    sw += w[j];
    sws += w[j] * s[j];
    sww += w[j] * w[j];
  }
  WeightedStats st;
  st.sum_w = sw;
  st.shift = shift;
  st.mean_s = sws / sw;
  double swd = 0.0;
  double sw2d = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = s[j] - st.mean_s;
    swd += w[j] * d * d;
    sw2d += w[j] * w[j] * d * d;
  }
  st.var_s = swd / sw;
  st.stderr_s = std::sqrt(sw2d) / sw;
  st.ess = sw * sw / sww;
  return st;
}

std::vector<double> constraint_dots(const SampleBank& bank, const std::vector<double>& f) {
  const std::size_t n = bank.size();
  const std::size_t k = bank.species_count();
  const double* data = bank.draws().data();
  std::vector<double> s(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double* p = data + j * k;
    double dot = 0.0;
    for (std::size_t i = 0; i < k; ++i) dot += f[i] * p[i];
    s[j] = dot;
  }
  return s;
}

void check_bank_inputs(const SampleBank& bank, const SpeciesCounts& counts,
                       const std::vector<double>& f) {
  if (bank.size() == 0) throw std::invalid_argument("sample bank is empty");
  if (!counts.same_counts(bank.counts()))
    throw std::invalid_argument("sample bank was drawn for different counts");
  check_constraint(counts, f);
}

// Shared quadrature for the k <= 3 oracle: accumulates the partition value,
// moments of s = f.p, and component means, over lattice points with weights.
struct OracleAccumulator {
  double shift = kNegInf;
  std::vector<double> log_values;   // log integrand per lattice point
  std::vector<double> quad_weight;  // quadrature weight per lattice point
};

struct OracleResult {
  ZetaEstimate zeta;
  std::vector<double> means;
};

OracleResult run_grid_oracle(const SpeciesCounts& counts, const PriorSpec& prior,
                             const std::vector<double>& f, double beta, std::size_t resolution) {
  const std::size_t k = counts.size();
  if (k > 3) throw UnsupportedDimension("grid oracle supports 2 or 3 species only");
  if (resolution < 100) throw std::invalid_argument("oracle resolution must be at least 100");
  check_prior(counts, prior);
  check_constraint(counts, f);

  const auto& m = counts.counts();
  const double n = static_cast<double>(counts.total());
  double log_coef = std::lgamma(n + 1.0);
  for (std::uint64_t c : m) log_coef -= std::lgamma(static_cast<double>(c) + 1.0);
  const bool flat = prior.is_flat();
  double log_prior_norm = 0.0;
  if (!flat)
    log_prior_norm = std::lgamma(static_cast<double>(k)) + log_beta_function(prior.concentration);

  // log integrand at a simplex point, -inf where the multinomial vanishes.
  auto log_integrand = [&](const double* p, double s) {
    double v = log_coef + beta * s;
    for (std::size_t i = 0; i < k; ++i) {
      const double exponent =
          static_cast<double>(m[i]) + (flat ? 0.0 : prior.concentration[i] - 1.0);
      if (p[i] <= 0.0) {
        if (exponent > 0.0) return kNegInf;
        if (exponent < 0.0) return std::numeric_limits<double>::infinity();
        continue;  // exponent 0: p^0 = 1 even at the boundary
      }
      v += exponent * std::log(p[i]);
    }
    return v - (flat ? 0.0 : log_prior_norm);
  };

  const std::size_t res = resolution;
  std::vector<double> logs;
  std::vector<double> weights;
  std::vector<double> svals;
  std::vector<std::array<double, 3>> points;

  if (k == 2) {
    const double h = 1.0 / static_cast<double>(res);
    logs.reserve(res + 1);
    for (std::size_t i = 0; i <= res; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(res);
      const double p[2] = {t, 1.0 - t};
      const double s = f[0] * p[0] + f[1] * p[1];
      logs.push_back(log_integrand(p, s));
      weights.push_back((i == 0 || i == res) ? 0.5 * h : h);
      svals.push_back(s);
      points.push_back({p[0], p[1], 0.0});
    }
  } else {
    // Barycentric lattice (i, j), i + j <= res; each small triangle has area
    // 1/(2 res^2) in the projected plane and contributes a third to each
    // vertex (exact for linear integrands).
    const double tri_area = 1.0 / (2.0 * static_cast<double>(res) * static_cast<double>(res));
    const auto index = [res](std::size_t i, std::size_t j) {
      // row i spans res+1-i entries
      return j + i * (res + 2) - i * (i + 1) / 2;
    };
    const std::size_t count = (res + 1) * (res + 2) / 2;
    logs.assign(count, 0.0);
    weights.assign(count, 0.0);
    svals.assign(count, 0.0);
    points.assign(count, {0.0, 0.0, 0.0});
    for (std::size_t i = 0; i <= res; ++i) {
      for (std::size_t j = 0; j + i <= res; ++j) {
        const double x = static_cast<double>(i) / static_cast<double>(res);
        const double y = static_cast<double>(j) / static_cast<double>(res);
        const double p[3] = {x, y, 1.0 - x - y};
        const double s = f[0] * p[0] + f[1] * p[1] + f[2] * p[2];
        const std::size_t idx = index(i, j);
        logs[idx] = log_integrand(p, s);
        svals[idx] = s;
        points[idx] = {p[0], p[1], p[2]};
      }
    }
    const double third = tri_area / 3.0;
    for (std::size_t i = 0; i < res; ++i) {
      for (std::size_t j = 0; j + i < res; ++j) {
        weights[index(i, j)] += third;
        weights[index(i + 1, j)] += third;
        weights[index(i, j + 1)] += third;
        if (j + i + 2 <= res) {
          weights[index(i + 1, j)] += third;
          weights[index(i, j + 1)] += third;
          weights[index(i + 1, j + 1)] += third;
        }
      }
    }
  }

  double shift = kNegInf;
  for (double v : logs) {
    if (v == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("oracle integrand diverges on the boundary (alpha < 1)");
    shift = std::max(shift, v);
  }
  double z = 0.0;
  double zs = 0.0;
  std::vector<double> zp(k, 0.0);
  for (std::size_t idx = 0; idx < logs.size(); ++idx) {
    const double w = weights[idx] * std::exp(logs[idx] - shift);
    z += w;
    zs += w * svals[idx];
    for (std::size_t i = 0; i < k; ++i) zp[i] += w * points[idx][i];
  }
  const double mean = zs / z;
  double zd = 0.0;
  for (std::size_t idx = 0; idx < logs.size(); ++idx) {
    const double w = weights[idx] * std::exp(logs[idx] - shift);
    const double d = svals[idx] - mean;
    zd += w * d * d;
  }

  OracleResult out;
  out.zeta.log_zeta = shift + std::log(z);
  out.zeta.dlog_dbeta = mean;
  out.zeta.d2log_dbeta2 = zd / z;
  out.zeta.stderr_log_zeta = 0.0;
  out.zeta.stderr_dlog_dbeta = 0.0;
  out.zeta.ess = static_cast<double>(logs.size());
  out.zeta.samples_used = logs.size();
  out.means.resize(k);
  for (std::size_t i = 0; i < k; ++i) out.means[i] = zp[i] / z;
  return out;
}

}  // namespace

SpeciesCounts::SpeciesCounts(std::vector<std::string> labels, std::vector<std::uint64_t> counts)
    : labels_(std::move(labels)), counts_(std::move(counts)) {
  if (labels_.size() != counts_.size())
    throw DimensionMismatch("species label count differs from count vector length");
  if (counts_.size() < 2) throw InvalidSample("at least two species are required");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw InvalidSample("species labels must be non-empty");
    for (std::size_t j = i + 1; j < labels_.size(); ++j)
      if (labels_[i] == labels_[j]) throw InvalidSample("duplicate species label: " + labels_[i]);
  }
  for (std::uint64_t c : counts_) total_ += c;
}

bool PriorSpec::is_flat() const noexcept {
  for (double a : concentration)
    if (a != 1.0) return false;
  return true;
}

double log_multinomial(const SpeciesCounts& counts, std::span<const double> p) {
  if (p.size() != counts.size())
    throw DimensionMismatch("simplex point length differs from species count");
  const double n = static_cast<double>(counts.total());
  double v = std::lgamma(n + 1.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = static_cast<double>(counts.counts()[i]);
    v -= std::lgamma(m + 1.0);
    if (counts.counts()[i] == 0) continue;
    if (p[i] <= 0.0) return kNegInf;
    v += m * std::log(p[i]);
  }
  return v;
}

SampleBank draw_bank(const SpeciesCounts& counts, const PriorSpec& prior, std::size_t n_samples,
                     std::uint64_t seed, unsigned threads) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
  check_prior(counts, prior);
  const std::size_t k = counts.size();

  std::vector<double> shape(k);
  for (std::size_t i = 0; i < k; ++i)
    shape[i] = static_cast<double>(counts.counts()[i]) + prior.concentration[i];

  SampleBank bank;
  bank.counts_ = counts;
  bank.prior_ = prior;
  bank.seed_ = seed;
  bank.n_ = n_samples;
  bank.k_ = k;
  bank.data_.resize(n_samples * k);

  const std::size_t n_chunks = (n_samples + kChunkSize - 1) / kChunkSize;
  auto fill_chunk = [&](std::size_t chunk) {
    std::mt19937_64 rng(chunk_seed(seed, chunk));
    std::vector<std::gamma_distribution<double>> gamma;
    gamma.reserve(k);
    for (std::size_t i = 0; i < k; ++i) gamma.emplace_back(shape[i], 1.0);
    const std::size_t begin = chunk * kChunkSize;
    const std::size_t end = std::min(n_samples, begin + kChunkSize);
    for (std::size_t j = begin; j < end; ++j) {
      double* p = bank.data_.data() + j * k;
      double sum = 0.0;
      do {
        sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
          p[i] = gamma[i](rng);
          sum += p[i];
        }
      } while (!(sum > 0.0));
      for (std::size_t i = 0; i < k; ++i) p[i] /= sum;
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n_chunks));
  if (workers == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) fill_chunk(c);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < n_chunks; c += workers) fill_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }
  return bank;
}

ZetaEstimate zeta_at(const SampleBank& bank, const SpeciesCounts& counts,
                     const std::vector<double>& f, double beta) {
  check_bank_inputs(bank, counts, f);
  const std::size_t n = bank.size();
  const std::vector<double> s = constraint_dots(bank, f);
  std::vector<double> w;
  const WeightedStats st = tilt_weights(s, beta, w);

  ZetaEstimate z;
  z.log_zeta =
      log_zeta_constant(counts, bank.prior()) + st.shift + std::log(st.sum_w / static_cast<double>(n));
  z.dlog_dbeta = st.mean_s;
  z.d2log_dbeta2 = st.var_s;
  z.stderr_dlog_dbeta = st.stderr_s;
  z.ess = st.ess;
  z.samples_used = n;
  if (n > 1) {
    const double wbar = st.sum_w / static_cast<double>(n);
    double sq = 0.0;
    for (double v : w) {
      const double d = v - wbar;
      sq += d * d;
    }
    z.stderr_log_zeta =
        std::sqrt(sq / static_cast<double>(n - 1)) / (wbar * std::sqrt(static_cast<double>(n)));
  }
  return z;
}

MeansEstimate posterior_means(const SampleBank& bank, const SpeciesCounts& counts,
                              const std::vector<double>& f, double beta) {
  check_bank_inputs(bank, counts, f);
  const std::size_t n = bank.size();
  const std::size_t k = bank.species_count();
  const std::vector<double> s = constraint_dots(bank, f);
  std::vector<double> w;
  const WeightedStats st = tilt_weights(s, beta, w);

  const double* data = bank.draws().data();
  MeansEstimate est;
  est.means.assign(k, 0.0);
  est.stderrs.assign(k, 0.0);
  est.ess = st.ess;
  for (std::size_t j = 0; j < n; ++j) {
    const double* p = data + j * k;
    for (std::size_t i = 0; i < k; ++i) est.means[i] += w[j] * p[i];
  }
  for (std::size_t i = 0; i < k; ++i) est.means[i] /= st.sum_w;
  for (std::size_t j = 0; j < n; ++j) {
    const double* p = data + j * k;
    const double w2 = w[j] * w[j];
    for (std::size_t i = 0; i < k; ++i) {
      const double d = p[i] - est.means[i];
      est.stderrs[i] += w2 * d * d;
    }
  }
  for (std::size_t i = 0; i < k; ++i) est.stderrs[i] = std::sqrt(est.stderrs[i]) / st.sum_w;
  return est;
}

ZetaEstimate grid_oracle(const SpeciesCounts& counts, const PriorSpec& prior,
                         const std::vector<double>& f, double beta, std::size_t resolution) {
  return run_grid_oracle(counts, prior, f, beta, resolution).zeta;
}

std::vector<double> grid_oracle_means(const SpeciesCounts& counts, const PriorSpec& prior,
                                      const std::vector<double>& f, double beta,
                                      std::size_t resolution) {
  return run_grid_oracle(counts, prior, f, beta, resolution).means;
}

}  // namespace mediv
