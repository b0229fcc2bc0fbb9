#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "reqa/evaluator.hpp"

namespace reqa {

/// Deterministic JSON serialization: {"reports": [...]} with sorted keys and
/// no environment-dependent fields, so identical runs are byte-identical.
std::string reports_to_json(const std::vector<EvalReport>& reports);
void write_report(const std::vector<EvalReport>& reports, const std::filesystem::path& path);
std::vector<EvalReport> load_report(const std::filesystem::path& path);

/// One markdown table per granularity: systems as rows, MRR/R@N as columns.
std::string render_report_markdown(const std::vector<EvalReport>& reports);

/// Side-by-side deltas between two report files covering the same task.
/// Reports are matched by granularity (and backend when several share one).
/// Refuses reports whose task fingerprints differ.
std::string compare_reports(const std::vector<EvalReport>& baseline,
                            const std::vector<EvalReport>& other);

}  // namespace reqa
