#pragma once

// Attribute accuracy of generated documents against hand-built ground
// truths.
//
// The rubric (which attributes count for a given ground truth) is fixed by
// kRubricVersion. Applicability depends on the ground truth only:
//
//   mark_specification   mark_type, link_mark_type; group_link_direction for
//                        group links; link_number for node links
//   data_structure       data_type, primary.dimension, secondary.dimension
//                        (element counts are mock sizes, not encodings)
//   layout per dimension stacking, size_uniform, size_range,
//                        anchor_distribute; subdividing when stacking;
//                        stacking_direction when stacking and not
//                        subdividing; anchor when not stacking;
//                        anchor_interval for uniform_interval; anchor_start
//                        for fixed_value and uniform_interval
//   layout links         source and target for node links
//   non-layout           one attribute per style key (scale together with the
//                        active payload); line_type for line, band, area
//   containers           coordinate and coordinate_system fields of every
//                        non-root container, polar fields for polar frames
//                        only; the root frame is the canvas and not scored

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "recast/dsl.hpp"

namespace recast {

inline constexpr int kRubricVersion = 1;

struct AttributePath {
  ContainerId container;
  std::string field;  // dotted, e.g. "layout_specification.x.stacking"

  std::string str() const;  // "0 . layout_specification.x.stacking"
  friend auto operator<=>(const AttributePath&, const AttributePath&) = default;
};

struct AttributeMismatch {
  AttributePath path;
  std::string expected;  // compact JSON
  std::string actual;    // compact JSON, or "<missing>"
  friend bool operator==(const AttributeMismatch&, const AttributeMismatch&) = default;
};

struct CaseResult {
  std::string name;
  int matched = 0;
  int mismatched = 0;
  std::vector<AttributeMismatch> mismatches;

  int total() const { return matched + mismatched; }
  /// Percentage; 100 for an empty case.
  double accuracy() const;
};

struct AccuracyReport {
  std::vector<CaseResult> cases;
  /// Cases that could not be loaded, as "name: reason".
  std::vector<std::string> load_errors;

  CaseResult overall() const;
};

std::vector<AttributePath> applicable_attributes(const DslDocument& ground_truth);

CaseResult score(const DslDocument& ground_truth, const DslDocument& generated, const std::string& name = "");

/// A case directory `<dir>/<name>/` holds ground_truth.revis.json and
/// generated.revis.json. Cases are scored in name order; unreadable cases
/// are reported in load_errors.
/// Produces the generated document for a case lacking generated.revis.json
/// (for instance by replaying recorded pipeline responses).
using CaseGenerator = std::function<DslDocument(const std::filesystem::path& case_dir)>;

AccuracyReport run_gallery(const std::filesystem::path& cases_dir, int threads = 1, const CaseGenerator& generate = {});

/// Accuracy rounded to one decimal place, as printed in reports.
double rounded_accuracy(int matched, int total);

std::string format_report_text(const AccuracyReport& report);
std::string format_report_csv(const AccuracyReport& report);
std::string format_report_json(const AccuracyReport& report);

/// Reads the per-case rows back from format_report_csv output (the overall
/// row is recomputed, not read).
AccuracyReport parse_report_csv(const std::string& csv);

}  // namespace recast
