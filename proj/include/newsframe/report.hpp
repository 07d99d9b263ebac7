#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "newsframe/experiment.hpp"

namespace newsframe {

enum class ReportFormat { Json, Table, Figure };

ReportFormat report_format_from_string(const std::string& s);

/// Rows are (task, modality) in first-appearance order; columns are the
/// All and Relevant subsets. Cells hold mean accuracy in percent.
std::string render_table_text(const std::vector<EvalReport>& reports);
std::string render_table_csv(const std::vector<EvalReport>& reports);

/// Grouped per-frame F1 bars, frames in id order, one bar per modality of
/// the frame task on the given subset. Empty when no report matches.
std::string render_f1_figure(const std::vector<EvalReport>& reports, Subset subset);

/// Writes the files for one format into out_dir and returns their paths:
///   json   -> reports.json
///   table  -> table.txt, table.csv
///   figure -> f1_all.svg and/or f1_relevant.svg
std::vector<std::filesystem::path> emit_report(const std::vector<EvalReport>& reports, ReportFormat format,
                                               const std::filesystem::path& out_dir);

}  // namespace newsframe
