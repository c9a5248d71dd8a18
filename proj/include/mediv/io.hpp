#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mediv/diversity.hpp"
#include "mediv/simplex.hpp"

namespace mediv::io {

enum class LogBase { nats, bits };

/// Counts file: UTF-8 CSV with header `species,count`, one species per row,
/// nonnegative integer counts, duplicate labels rejected. Errors carry the
/// 1-based line number.
SpeciesCounts parse_counts_csv(std::string_view text, const std::string& source);
SpeciesCounts read_counts_csv(const std::string& path);

/// Constraint file: JSON object {"coefficients": {label: number, ...},
/// "target": number}. Species absent from the map get coefficient 0; labels
/// not present in the sample are an error.
LinearMoment parse_constraint_json(std::string_view text, const SpeciesCounts& counts,
                                   const std::string& source);
LinearMoment read_constraint_json(const std::string& path, const SpeciesCounts& counts);

/// Everything a report needs. `estimate` is set for the estimate command;
/// the compare command carries the unconstrained run plus, when a constraint
/// was given, the constrained run.
struct ReportContext {
  std::string command;  // shannon | estimate | compare
  LogBase log_base = LogBase::nats;
  const SpeciesCounts* counts = nullptr;
  std::optional<LinearMoment> constraint;
  std::optional<DiversityReport> estimate;
  std::optional<DiversityReport> compare_unconstrained;
  std::optional<DiversityReport> compare_constrained;
};

/// Stable-ordered JSON; bytes are fully determined by the context.
std::string render_json(const ReportContext& ctx);
std::string render_text(const ReportContext& ctx);

}  // namespace mediv::io
