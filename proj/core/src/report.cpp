#include "grasp/report.hpp"

#include "grasp/errors.hpp"
#include "grasp/kv_text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>

namespace grasp {

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept {
  if (text == "table") return ReportFormat::Table;
  if (text == "csv") return ReportFormat::Csv;
  return std::nullopt;
}

namespace {

std::string percent(double fraction) { return fmt::format("{:.2f}", 100.0 * fraction); }

std::string mean_std(const EvaluationReport& r) {
  return fmt::format("{:.2f}±{:.2f}", 100.0 * r.mean_accuracy, 100.0 * r.std_accuracy);
}

std::size_t max_folds(std::span<const EvaluationReport> reports) {
  std::size_t n = 0;
  for (const auto& r : reports) n = std::max(n, r.per_fold_accuracy.size());
  return n;
}

// Pads by code points so "±" does not skew the columns.
std::string pad(const std::string& text, std::size_t width) {
  const auto glyphs = static_cast<std::size_t>(
      std::count_if(text.begin(), text.end(), [](char c) { return (c & 0xC0) != 0x80; }));
  return text + std::string(width > glyphs ? width - glyphs : 1, ' ');
}

void append_confusion(std::string& out, const EvaluationReport& r) {
  out += fmt::format("\nConfusion ({}, {}; rows true, columns predicted)\n", display_name(r.method),
                     to_string(r.paradigm));
  out += pad("", 10);
  for (auto c : kAllClasses) out += pad(std::string(to_string(c)), 9);
  out += '\n';
  for (auto t : kAllClasses) {
    out += pad(std::string(to_string(t)), 10);
    for (auto p : kAllClasses) {
      out += pad(std::to_string(r.confusion[class_index(t)][class_index(p)]), 9);
    }
    out += '\n';
  }
}

double parse_number(std::string_view cell, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    fail(ErrorKind::FormatError, fmt::format("report csv line {}: '{}' is not a number", line, cell));
  }
  return v;
}

}  // namespace

std::string emit_report(std::span<const EvaluationReport> reports, ReportFormat format) {
  const auto n_folds = max_folds(reports);
  std::string out;
  if (format == ReportFormat::Csv) {
    out += "fold";
    for (const auto& r : reports) out += fmt::format(",{}", to_string(r.method));
    out += '\n';
    for (std::size_t f = 0; f < n_folds; ++f) {
      out += std::to_string(f + 1);
      for (const auto& r : reports) {
        out += ',';
        if (f < r.per_fold_accuracy.size()) out += percent(r.per_fold_accuracy[f]);
      }
      out += '\n';
    }
    out += "mean";
    for (const auto& r : reports) out += ',' + percent(r.mean_accuracy);
    out += "\nstd";
    for (const auto& r : reports) out += ',' + percent(r.std_accuracy);
    out += '\n';
    return out;
  }

  constexpr std::size_t kFirst = 12;
  constexpr std::size_t kCol = 16;
  out += "Accuracy (%)\n";
  out += pad("Fold", kFirst);
  for (const auto& r : reports) out += pad(std::string(display_name(r.method)), kCol);
  out += '\n';
  for (std::size_t f = 0; f < n_folds; ++f) {
    out += pad(std::to_string(f + 1), kFirst);
    for (const auto& r : reports) {
      out += pad(f < r.per_fold_accuracy.size() ? percent(r.per_fold_accuracy[f]) : "-", kCol);
    }
    out += '\n';
  }
  out += pad("Mean±Std.", kFirst);
  for (const auto& r : reports) out += pad(mean_std(r), kCol);
  out += '\n';
  for (const auto& r : reports) {
    if (!r.per_trial_records.empty()) append_confusion(out, r);
  }
  // Trailing pad spaces are noise in diffs.
  std::string trimmed;
  std::size_t pos = 0;
  while (pos < out.size()) {
    const auto end = out.find('\n', pos);
    auto line = std::string_view(out).substr(pos, end - pos);
    while (!line.empty() && line.back() == ' ') line.remove_suffix(1);
    trimmed += line;
    trimmed += '\n';
    pos = end + 1;
  }
  return trimmed;
}

std::string emit_report(const EvaluationReport& report, ReportFormat format) {
  return emit_report(std::span<const EvaluationReport>(&report, 1), format);
}

ParsedReport parse_report_csv(std::string_view text) {
  ParsedReport p;
  const auto lines = split_list(text, '\n');
  std::size_t line_no = 0;
  bool header = true;
  for (const auto& line : lines) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_list(line, ',');
    if (header) {
      if (cells.empty() || cells[0] != "fold") {
        fail(ErrorKind::FormatError, "report csv: missing 'fold' header");
      }
      for (std::size_t i = 1; i < cells.size(); ++i) {
        const auto m = parse_method(cells[i]);
        if (!m) fail(ErrorKind::FormatError, fmt::format("report csv: unknown method '{}'", cells[i]));
        p.methods.push_back(*m);
      }
      p.per_fold.resize(p.methods.size());
      header = false;
      continue;
    }
    if (cells.size() != p.methods.size() + 1) {
      fail(ErrorKind::FormatError, fmt::format("report csv line {}: expected {} cells, found {}",
                                               line_no, p.methods.size() + 1, cells.size()));
    }
    for (std::size_t m = 0; m < p.methods.size(); ++m) {
      const auto& cell = cells[m + 1];
      if (cells[0] == "mean") {
        p.mean.push_back(parse_number(cell, line_no));
      } else if (cells[0] == "std") {
        p.std_dev.push_back(parse_number(cell, line_no));
      } else if (!cell.empty()) {
        p.per_fold[m].push_back(parse_number(cell, line_no));
      }
    }
  }
  if (header || p.mean.size() != p.methods.size() || p.std_dev.size() != p.methods.size()) {
    fail(ErrorKind::FormatError, "report csv: missing header or mean/std rows");
  }
  return p;
}

std::string emit_match_reports(std::span<const MatchReport> reports, ReportFormat format,
                               std::span<const std::optional<GraspClass>> truth) {
  const bool with_truth = !truth.empty();
  if (with_truth && truth.size() != reports.size()) {
    fail(ErrorKind::DimensionMismatch, "truth list length differs from report count");
  }
  const char* sep = format == ReportFormat::Csv ? "," : "  ";
  std::string out = fmt::format("trial_id{0}predicted{0}mse_lateral{0}mse_pincer{0}mse_palmar", sep);
  if (with_truth) out += fmt::format("{}true", sep);
  out += '\n';
  std::size_t labeled = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    out += fmt::format("{1}{0}{2}{0}{3:.6f}{0}{4:.6f}{0}{5:.6f}", sep, r.trial_id, to_string(r.predicted),
                       r.per_class_mean_mse[0], r.per_class_mean_mse[1], r.per_class_mean_mse[2]);
    if (with_truth) {
      out += sep;
      out += truth[i] ? std::string(to_string(*truth[i])) : "unlabeled";
      if (truth[i]) {
        ++labeled;
        correct += *truth[i] == r.predicted;
      }
    }
    out += '\n';
  }
  if (format == ReportFormat::Table && labeled > 0) {
    out += fmt::format("accuracy {:.2f}% ({}/{})\n",
                       100.0 * static_cast<double>(correct) / static_cast<double>(labeled), correct, labeled);
  }
  return out;
}

}  // namespace grasp
