#pragma once

#include "grasp/evaluation.hpp"
#include "grasp/matching.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace grasp {

enum class ReportFormat { Table, Csv };

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept;

/// Accuracy in percent, one column per report and one row per fold, then a
/// "Mean±Std." row. The table form appends a confusion section for every
/// report with per-trial records. Numbers carry two decimals.
std::string emit_report(std::span<const EvaluationReport> reports, ReportFormat format);
std::string emit_report(const EvaluationReport& report, ReportFormat format);

/// Values recovered from emit_report(..., Csv), in percent.
struct ParsedReport {
  std::vector<Method> methods;
  /// per_fold[m] holds the fold values of methods[m].
  std::vector<std::vector<double>> per_fold;
  std::vector<double> mean;
  std::vector<double> std_dev;
};

/// Throws FormatError on malformed input.
ParsedReport parse_report_csv(std::string_view text);

/// One row per trial: id, predicted class, per-class aggregated error, and
/// the true class when `truth` is given (same length as `reports`).
std::string emit_match_reports(std::span<const MatchReport> reports, ReportFormat format,
                               std::span<const std::optional<GraspClass>> truth = {});

}  // namespace grasp
