#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mediv/diversity.hpp"
#include "mediv/errors.hpp"
#include "mediv/io.hpp"
#include "mediv/simplex.hpp"

namespace {

// Exit codes: 0 ok, 2 parse/usage, 3 domain, 4 unattainable target,
// 5 degenerate constraint, 1 anything else.
constexpr int kExitParse = 2;
constexpr int kExitDomain = 3;
constexpr int kExitUnattainable = 4;
constexpr int kExitDegenerate = 5;

struct RunConfig {
  std::string counts_path;
  std::string constraint_path;
  std::vector<double> prior_alpha{1.0};
  std::size_t n_samples = 1'000'000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tolerance = 1e-4;
  unsigned threads = 1;
  std::string format = "text";
  std::string log_base = "nats";
};

mediv::PriorSpec make_prior(const RunConfig& cfg, std::size_t k) {
  if (cfg.prior_alpha.size() == 1)
    return mediv::PriorSpec{std::vector<double>(k, cfg.prior_alpha[0])};
  if (cfg.prior_alpha.size() != k)
    throw mediv::ParseError("--prior-alpha needs 1 value or one per species (" +
                            std::to_string(k) + ")");
  return mediv::PriorSpec{cfg.prior_alpha};
}

std::uint64_t resolve_seed(const RunConfig& cfg) {
  if (cfg.seed_given) return cfg.seed;
  if (const char* env = std::getenv("MEDIV_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw mediv::ParseError(std::string("MEDIV_SEED is not a valid seed: ") + env);
    }
  }
  return cfg.seed;
}

void emit(const mediv::io::ReportContext& ctx, const RunConfig& cfg) {
  std::cout << (cfg.format == "json" ? mediv::io::render_json(ctx) : mediv::io::render_text(ctx));
}

mediv::io::LogBase log_base_of(const RunConfig& cfg) {
  return cfg.log_base == "bits" ? mediv::io::LogBase::bits : mediv::io::LogBase::nats;
}

int run_shannon(const RunConfig& cfg) {
  const mediv::SpeciesCounts counts = mediv::io::read_counts_csv(cfg.counts_path);
  mediv::shannon(counts);  // surfaces EmptySample before rendering
  mediv::io::ReportContext ctx;
  ctx.command = "shannon";
  ctx.log_base = log_base_of(cfg);
  ctx.counts = &counts;
  emit(ctx, cfg);
  return 0;
}

int run_estimate(const RunConfig& cfg) {
  const mediv::SpeciesCounts counts = mediv::io::read_counts_csv(cfg.counts_path);
  std::optional<mediv::LinearMoment> constraint;
  if (!cfg.constraint_path.empty())
    constraint = mediv::io::read_constraint_json(cfg.constraint_path, counts);

  mediv::SamplingConfig sampling;
  sampling.n_samples = cfg.n_samples;
  sampling.seed = resolve_seed(cfg);
  sampling.threads = cfg.threads;
  sampling.tolerance = cfg.tolerance;

  mediv::io::ReportContext ctx;
  ctx.command = "estimate";
  ctx.log_base = log_base_of(cfg);
  ctx.counts = &counts;
  ctx.constraint = constraint;
  ctx.estimate = mediv::me_diversity(counts, make_prior(cfg, counts.size()), constraint, sampling);
  emit(ctx, cfg);
  return 0;
}

int run_compare(const RunConfig& cfg) {
  const mediv::SpeciesCounts counts = mediv::io::read_counts_csv(cfg.counts_path);
  std::optional<mediv::LinearMoment> constraint;
  if (!cfg.constraint_path.empty())
    constraint = mediv::io::read_constraint_json(cfg.constraint_path, counts);

  mediv::SamplingConfig sampling;
  sampling.n_samples = cfg.n_samples;
  sampling.seed = resolve_seed(cfg);
  sampling.threads = cfg.threads;
  sampling.tolerance = cfg.tolerance;

  const mediv::PriorSpec prior = make_prior(cfg, counts.size());
  mediv::io::ReportContext ctx;
  ctx.command = "compare";
  ctx.log_base = log_base_of(cfg);
  ctx.counts = &counts;
  ctx.constraint = constraint;
  ctx.compare_unconstrained = mediv::me_diversity(counts, prior, std::nullopt, sampling);
  if (constraint)
    ctx.compare_constrained = mediv::me_diversity(counts, prior, constraint, sampling);
  emit(ctx, cfg);
  return 0;
}

void add_common_options(CLI::App* sub, RunConfig& cfg, bool monte_carlo) {
  sub->add_option("--counts", cfg.counts_path, "counts CSV with header 'species,count'")
      ->required();
  sub->add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  sub->add_option("--log-base", cfg.log_base, "unit for entropy-like values")
      ->check(CLI::IsMember({"nats", "bits"}));
  if (!monte_carlo) return;
  sub->add_option("--constraint", cfg.constraint_path,
                  "constraint JSON {\"coefficients\": {species: value}, \"target\": value}");
  sub->add_option("--samples", cfg.n_samples, "Monte Carlo sample count")
      ->check(CLI::Range(static_cast<std::size_t>(1000), static_cast<std::size_t>(1) << 40));
  sub->add_option("--seed", cfg.seed, "RNG seed (MEDIV_SEED is the fallback)")
      ->each([&cfg](const std::string&) { cfg.seed_given = true; });
  sub->add_option("--prior-alpha", cfg.prior_alpha,
                  "Dirichlet concentration: one value, or one per species")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sub->add_option("--tolerance", cfg.tolerance, "moment residual tolerance")
      ->check(CLI::PositiveNumber);
  sub->add_option("--threads", cfg.threads, "worker threads for sampling (output-invariant)")
      ->check(CLI::Range(1u, 256u));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maximum-entropy diversity estimation from species counts"};
  app.require_subcommand(1);

  RunConfig cfg;
  CLI::App* shannon_cmd =
      app.add_subcommand("shannon", "frequency-based Shannon and Simpson measures");
  add_common_options(shannon_cmd, cfg, false);
  CLI::App* estimate_cmd =
      app.add_subcommand("estimate", "maximum-entropy diversity with optional moment constraint");
  add_common_options(estimate_cmd, cfg, true);
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "traditional vs maximum-entropy measures side by side");
  add_common_options(compare_cmd, cfg, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (shannon_cmd->parsed()) return run_shannon(cfg);
    if (estimate_cmd->parsed()) return run_estimate(cfg);
    return run_compare(cfg);
  } catch (const mediv::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const mediv::UnattainableTarget& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnattainable;
  } catch (const mediv::DegenerateConstraint& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const mediv::StalledAtDegenerate& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const mediv::EmptySample& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const mediv::InvalidSample& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
