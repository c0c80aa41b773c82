#pragma once

#include <string>
#include <vector>

#include "recast/dsl.hpp"

namespace recast {

enum class Severity { error, warning };

std::string_view to_string(Severity s);

struct ValidationEntry {
  Severity severity = Severity::error;
  ContainerId container;
  std::string rule;
  std::string message;

  friend bool operator==(const ValidationEntry&, const ValidationEntry&) = default;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;

  bool empty() const { return entries.empty(); }
  bool has_errors() const;
  std::size_t error_count() const;
  /// Entries for one rule id, in report order.
  std::vector<ValidationEntry> with_rule(std::string_view rule) const;
};

/// Checks every structural and typed invariant of the document. Entries are
/// ordered by container path, then by rule id and message, so two calls on
/// equal documents yield identical reports.
ValidationReport validate(const DslDocument& doc);

/// Frame-local checks only (used by edits before touching the tree).
std::vector<std::string> frame_problems(const CoordinateFrame& frame);

/// "#RRGGBB" with hex digits of either case.
bool is_color(std::string_view s);

/// Human-readable one-line-per-entry form.
std::string format_report(const ValidationReport& report);

}  // namespace recast
