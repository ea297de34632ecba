#include "rca/report.hpp"

#include <cstdio>
#include <sstream>

namespace rca {

namespace {

Json ids_json(const std::vector<TraceIndex>& ids, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (TraceIndex i : ids) out.push_back(names.at(i));
  return out;
}

std::string round2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string pattern_text(const Json& pattern) {
  std::string s = "(";
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (i) s += ", ";
    s += pattern[i].get<std::string>();
  }
  return s + ")";
}

}  // namespace

Json mined_pattern_json(const MinedPattern& mp, const TraceGroup& group) {
  Json j;
  j["pattern"] = pattern_labels(mp.pattern, *group.vocab);
  j["support"] = mp.support();
  Json ids = Json::array();
  for (TraceIndex i : mp.supporting) ids.push_back(group.traces.at(i).trace_id);
  j["trace_ids"] = std::move(ids);
  return j;
}

Json stats_row_json(const PatternStats& row, const AnalysisResult& result, bool with_ids) {
  Json j;
  j["pattern"] = pattern_labels(row.pattern, *result.vocab);
  j["test_support"] = row.test_support();
  j["control_support"] = row.control_support();
  j["precision"] = row.precision;
  j["recall"] = row.recall;
  j["f1"] = row.f1;
  if (with_ids) j["test_trace_ids"] = ids_json(row.test_ids, result.test_trace_ids);
  return j;
}

Json deduped_rows_json(const AnalysisResult& result, const DedupeResult& deduped, std::size_t top_k) {
  Json rows = Json::array();
  for (const auto& cluster : deduped.clusters) {
    if (top_k && rows.size() >= top_k) break;
    Json row = stats_row_json(result.rows.at(cluster.representative), result, true);
    row["cluster_size"] = cluster.members.size();
    Json members = Json::array();
    for (std::size_t m : cluster.members)
      members.push_back(pattern_labels(result.rows.at(m).pattern, *result.vocab));
    row["cluster_members"] = std::move(members);
    rows.push_back(std::move(row));
  }
  return rows;
}

Json analysis_metadata_json(const AnalysisResult& result) {
  Json meta;
  meta["control_mode"] = std::string(to_string(result.control_mode));
  meta["resolved_min_support"] = result.resolved_min_support;
  meta["resolved_min_support_control"] = result.resolved_min_support_control;
  meta["test_size"] = result.test_size;
  meta["control_size"] = result.control_size;
  meta["pattern_count"] = result.rows.size();
  meta["warnings"] = result.warnings;
  return meta;
}

Json make_report(const AnalysisResult& result, const DedupeResult& deduped, const ReportInputs& inputs) {
  Json report;
  report["schema"] = kReportSchema;
  report["config"] = inputs.config;

  Json meta = analysis_metadata_json(result);
  meta["similarity_threshold"] = deduped.threshold;
  meta["rejected_records"] = {{"test", inputs.rejected_test}, {"control", inputs.rejected_control}};
  Json binning = Json::array();
  for (const auto& spec : inputs.binning) binning.push_back(to_json(spec));
  meta["binning"] = std::move(binning);
  report["metadata"] = std::move(meta);

  report["rows"] = deduped_rows_json(result, deduped);
  Json ranked = Json::array();
  for (const auto& row : result.rows) ranked.push_back(stats_row_json(row, result, false));
  report["ranked"] = std::move(ranked);
  return report;
}

RegressionAnalysis regression_from_report(const std::string& regression_id, const Json& report) {
  if (!report.is_object() || !report.contains("schema"))
    throw ReportError(regression_id + ": not an analysis report");
  if (report["schema"] != kReportSchema)
    throw ReportError(regression_id + ": incompatible report schema " + report["schema"].dump());
  RegressionAnalysis out;
  out.regression_id = regression_id;
  try {
    for (const auto& row : report.at("ranked")) {
      out.scores.push_back({row.at("pattern").get<LabeledPattern>(), row.at("precision").get<double>(),
                            row.at("recall").get<double>(), row.at("f1").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ReportError(regression_id + ": malformed ranked rows: " + e.what());
  }
  return out;
}

std::string format_table(const Json& rows, std::size_t top_k) {
  std::vector<std::string> patterns;
  std::size_t width = 7;
  for (std::size_t i = 0; i < rows.size() && (top_k == 0 || i < top_k); ++i) {
    patterns.push_back(pattern_text(rows[i]["pattern"]));
    width = std::max(width, patterns.back().size());
  }
  std::ostringstream out;
  char line[64];
  out << std::string(width - 7, ' ') << "Pattern  Test  Ctrl  Prec  Recall    F1\n";
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const auto& r = rows[i];
    std::snprintf(line, sizeof line, "%6zu%6zu  %4s  %6s  %4s", r["test_support"].get<std::size_t>(),
                  r["control_support"].get<std::size_t>(), round2(r["precision"].get<double>()).c_str(),
                  round2(r["recall"].get<double>()).c_str(), round2(r["f1"].get<double>()).c_str());
    out << std::string(width - patterns[i].size(), ' ') << patterns[i] << line << '\n';
  }
  return out.str();
}

}  // namespace rca
