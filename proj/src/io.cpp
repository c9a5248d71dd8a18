#include "mediv/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "mediv/errors.hpp"

namespace mediv::io {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kLn2 = 0.6931471805599453;

const char* const kAbundanceNote =
    "the frequency-based measure is unchanged when all counts are rescaled; the "
    "maximum-entropy measure also reflects total abundance, so samples with equal frequency "
    "ratios but different totals score differently";

const char* const kSignConventionNote =
    "sign convention: s_me = log_zeta - beta*F, with the multiplier added in the underlying "
    "maximization; under the opposite convention beta flips sign and the measure reads "
    "log_zeta + beta*F";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double to_base(double nats, LogBase base) { return base == LogBase::bits ? nats / kLn2 : nats; }

const char* unit_name(LogBase base) { return base == LogBase::bits ? "bits" : "nats"; }

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string compact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ordered_json sample_block(const SpeciesCounts& counts) {
  ordered_json j;
  j["species"] = counts.labels();
  j["counts"] = counts.counts();
  j["n"] = counts.total();
  return j;
}

ordered_json traditional_block(const SpeciesCounts& counts, LogBase base) {
  ordered_json j;
  j["shannon"] = to_base(shannon(counts), base);
  j["simpson"] = simpson(counts);
  j["simpson_complement"] = 1.0 - simpson(counts);
  j["caveat"] = kFrequencyCaveat;
  return j;
}

ordered_json constraint_block(const LinearMoment& moment) {
  ordered_json j;
  j["coefficients"] = moment.coefficients;
  j["target"] = moment.target;
  return j;
}

ordered_json me_block(const DiversityReport& r, LogBase base) {
  ordered_json j;
  j["beta"] = r.beta;
  j["log_zeta"] = to_base(r.log_zeta, base);
  j["s_me"] = to_base(r.s_me, base);
  j["target_f"] = r.target_f;
  j["has_constraint"] = r.has_constraint;
  j["posterior_means"] = r.posterior_means;
  j["posterior_stderrs"] = r.posterior_stderrs;
  j["ess"] = r.ess;
  j["stderr_log_zeta"] = to_base(r.stderr_log_zeta, base);
  j["stderr_f_mean"] = r.stderr_f_mean;
  ordered_json solver;
  solver["iterations"] = r.solver_iterations;
  solver["converged"] = r.solver_converged;
  solver["residual"] = r.solver_residual;
  solver["bracket_lo"] = r.bracket_lo;
  solver["bracket_hi"] = r.bracket_hi;
  j["solver"] = solver;
  return j;
}

void append_notes(std::vector<std::string>& out, const std::vector<std::string>& notes) {
  for (const auto& n : notes)
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
}

std::string species_table(const SpeciesCounts& counts, const DiversityReport* rep) {
  std::size_t width = 7;  // "species"
  for (const auto& l : counts.labels()) width = std::max(width, l.size());
  std::ostringstream os;
  os << "  ";
  os.width(static_cast<std::streamsize>(width));
  os << std::left << "species" << std::right << "  count  frequency";
  if (rep) os << "       mean     stderr";
  os << "\n";
  const double n = static_cast<double>(counts.total());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    os << "  ";
    os.width(static_cast<std::streamsize>(width));
    os << std::left << counts.labels()[i] << std::right;
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %5llu  %9.6f",
                  static_cast<unsigned long long>(counts.counts()[i]),
                  n > 0 ? static_cast<double>(counts.counts()[i]) / n : 0.0);
    os << buf;
    if (rep) {
      std::snprintf(buf, sizeof buf, "   %8.6f  %9.3g", rep->posterior_means[i],
                    rep->posterior_stderrs[i]);
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

std::string me_text(const DiversityReport& r, LogBase base) {
  std::ostringstream os;
  os << "  beta                 " << compact(r.beta) << "\n";
  os << "  log zeta             " << fixed6(to_base(r.log_zeta, base)) << " " << unit_name(base)
     << "\n";
  os << "  s_me                 " << fixed6(to_base(r.s_me, base)) << " " << unit_name(base)
     << "\n";
  if (r.has_constraint) {
    os << "  constraint target    " << compact(r.target_f) << "  (residual " << compact(r.solver_residual)
       << ")\n";
  }
  os << "  ess                  " << compact(r.ess) << " of " << r.n_samples << "\n";
  if (r.solver_iterations > 0) {
    os << "  solver               " << r.solver_iterations << " iterations, "
       << (r.solver_converged ? "converged" : "not converged") << "\n";
  }
  return os.str();
}

}  // namespace

SpeciesCounts parse_counts_csv(std::string_view text, const std::string& source) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<std::string> labels;
  std::vector<std::uint64_t> counts;
  bool saw_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    if (!saw_header) {
      std::string header(trim(line));
      header.erase(std::remove_if(header.begin(), header.end(),
                                  [](char c) { return c == ' ' || c == '\t'; }),
                   header.end());
      if (header != "species,count")
        throw ParseError(source + ":" + std::to_string(line_no) +
                             ": expected header 'species,count'",
                         line_no);
      saw_header = true;
      continue;
    }

    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(source + ":" + std::to_string(line_no) +
                           ": expected exactly two fields 'species,count'",
                       line_no);
    const std::string_view label = trim(line.substr(0, comma));
    const std::string_view value = trim(line.substr(comma + 1));
    if (label.empty())
      throw ParseError(source + ":" + std::to_string(line_no) + ": empty species label", line_no);
    for (const auto& existing : labels)
      if (existing == label)
        throw ParseError(source + ":" + std::to_string(line_no) + ": duplicate species label '" +
                             std::string(label) + "'",
                         line_no);
    std::uint64_t count = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), count);
    if (ec != std::errc{} || ptr != value.data() + value.size())
      throw ParseError(source + ":" + std::to_string(line_no) + ": count for '" +
                           std::string(label) + "' must be a nonnegative integer (column " +
                           std::to_string(comma + 2) + ")",
                       line_no);
    labels.emplace_back(label);
    counts.push_back(count);
  }
  if (!saw_header) throw ParseError(source + ":1: expected header 'species,count'", 1);

  try {
    return SpeciesCounts(std::move(labels), std::move(counts));
  } catch (const InvalidSample& e) {
    throw InvalidSample(source + ": " + e.what());
  }
}

SpeciesCounts read_counts_csv(const std::string& path) {
  return parse_counts_csv(read_file(path), path);
}

LinearMoment parse_constraint_json(std::string_view text, const SpeciesCounts& counts,
                                   const std::string& source) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError(source + ": invalid JSON");
  if (!j.is_object()) throw ParseError(source + ": constraint must be a JSON object");
  for (const auto& item : j.items())
    if (item.key() != "coefficients" && item.key() != "target")
      throw ParseError(source + ": unknown key '" + item.key() + "'");
  if (!j.contains("coefficients") || !j["coefficients"].is_object())
    throw ParseError(source + ": 'coefficients' must be an object of species -> number");
  if (!j.contains("target") || !j["target"].is_number())
    throw ParseError(source + ": 'target' must be a number");

  LinearMoment moment;
  moment.coefficients.assign(counts.size(), 0.0);
  moment.target = j["target"].get<double>();
  for (const auto& item : j["coefficients"].items()) {
    if (!item.value().is_number())
      throw ParseError(source + ": coefficient for '" + item.key() + "' must be a number");
    const auto& labels = counts.labels();
    const auto it = std::find(labels.begin(), labels.end(), item.key());
    if (it == labels.end())
      throw ParseError(source + ": unknown species '" + item.key() + "' in constraint");
    moment.coefficients[static_cast<std::size_t>(it - labels.begin())] =
        item.value().get<double>();
  }
  return moment;
}

LinearMoment read_constraint_json(const std::string& path, const SpeciesCounts& counts) {
  return parse_constraint_json(read_file(path), counts, path);
}

std::string render_json(const ReportContext& ctx) {
  const DiversityReport* config_source = nullptr;
  if (ctx.estimate) config_source = &*ctx.estimate;
  if (ctx.compare_unconstrained) config_source = &*ctx.compare_unconstrained;

  ordered_json j;
  j["command"] = ctx.command;
  j["log_base"] = unit_name(ctx.log_base);
  if (config_source) {
    j["seed"] = config_source->seed;
    j["n_samples"] = config_source->n_samples;
  } else {
    j["seed"] = nullptr;
    j["n_samples"] = nullptr;
  }
  j["sample"] = sample_block(*ctx.counts);
  j["traditional"] = traditional_block(*ctx.counts, ctx.log_base);
  j["constraint"] = ctx.constraint ? constraint_block(*ctx.constraint) : ordered_json(nullptr);
  j["me"] = ctx.estimate ? me_block(*ctx.estimate, ctx.log_base) : ordered_json(nullptr);
  j["me_unconstrained"] = ctx.compare_unconstrained
                              ? me_block(*ctx.compare_unconstrained, ctx.log_base)
                              : ordered_json(nullptr);
  j["me_constrained"] = ctx.compare_constrained
                            ? me_block(*ctx.compare_constrained, ctx.log_base)
                            : ordered_json(nullptr);

  std::vector<std::string> notes;
  if (ctx.command == "compare") notes.push_back(kAbundanceNote);
  if (ctx.constraint) notes.push_back(kSignConventionNote);
  if (ctx.estimate) append_notes(notes, ctx.estimate->notes);
  if (ctx.compare_unconstrained) append_notes(notes, ctx.compare_unconstrained->notes);
  if (ctx.compare_constrained) append_notes(notes, ctx.compare_constrained->notes);
  j["notes"] = notes;
  return j.dump(2) + "\n";
}

std::string render_text(const ReportContext& ctx) {
  const SpeciesCounts& counts = *ctx.counts;
  const LogBase base = ctx.log_base;
  std::ostringstream os;
  os << "sample: " << counts.size() << " species, n = " << counts.total() << "\n";

  if (ctx.command == "shannon") {
    os << species_table(counts, nullptr) << "\n";
    os << "  shannon diversity      " << fixed6(to_base(shannon(counts), base)) << " "
       << unit_name(base) << "\n";
    os << "  simpson concentration  " << fixed6(simpson(counts)) << "\n";
    os << "  simpson diversity      " << fixed6(1.0 - simpson(counts)) << "\n";
    os << "\nnote: " << kFrequencyCaveat << "\n";
    return os.str();
  }

  if (ctx.command == "estimate") {
    const DiversityReport& r = *ctx.estimate;
    if (ctx.constraint) {
      os << "constraint: <f, p> target " << compact(ctx.constraint->target) << "\n";
    } else {
      os << "constraint: none (beta = 0)\n";
    }
    os << "\n" << species_table(counts, &r) << "\n";
    os << me_text(r, base);
    os << "  shannon              " << fixed6(to_base(r.s_traditional, base)) << " "
       << unit_name(base) << "  (frequency-based)\n";
    os << "  simpson              " << fixed6(r.simpson) << "\n";
    os << "\n  seed " << r.seed << ", samples " << r.n_samples << "\n";
    if (ctx.constraint) os << "\nnote: " << kSignConventionNote << "\n";
    for (const auto& n : r.notes) os << "\nnote: " << n << "\n";
    os << "\nnote: " << kFrequencyCaveat << "\n";
    return os.str();
  }

  // compare
  const DiversityReport& plain = *ctx.compare_unconstrained;
  const auto row = [&](const std::string& label, const std::string& value, const char* unit) {
    os << "  " << std::left << std::setw(32) << label << std::right << std::setw(13) << value;
    if (unit) os << " " << unit;
    os << "\n";
  };
  os << "\n";
  row("measure", "value", nullptr);
  row("shannon (frequency-based)", fixed6(to_base(plain.s_traditional, base)), unit_name(base));
  row("s_me (no constraint)", fixed6(to_base(plain.s_me, base)), unit_name(base));
  if (ctx.compare_constrained) {
    row("s_me (constraint target " + compact(ctx.compare_constrained->target_f) + ")",
        fixed6(to_base(ctx.compare_constrained->s_me, base)), unit_name(base));
  }
  os << "\n  seed " << plain.seed << ", samples " << plain.n_samples << "\n";
  os << "\nnote: " << kAbundanceNote << "\n";
  if (ctx.constraint) os << "\nnote: " << kSignConventionNote << "\n";
  std::vector<std::string> notes;
  append_notes(notes, plain.notes);
  if (ctx.compare_constrained) append_notes(notes, ctx.compare_constrained->notes);
  for (const auto& n : notes) os << "\nnote: " << n << "\n";
  os << "\nnote: " << kFrequencyCaveat << "\n";
  return os.str();
}

}  // namespace mediv::io
