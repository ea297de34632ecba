#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rca/discretize.hpp"
#include "rca/rca_ranker.hpp"
#include "rca/redundancy_filter.hpp"
#include "rca/regression_linker.hpp"

namespace rca {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "rca-report/1";

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `{"pattern":[...], "support":n, "trace_ids":[...]}`
Json mined_pattern_json(const MinedPattern& mp, const TraceGroup& group);

/// One ranked row; trace ids are included when `with_ids` is set.
Json stats_row_json(const PatternStats& row, const AnalysisResult& result, bool with_ids);

/// Representatives with `cluster_size` and `cluster_members`; `top_k` of 0 keeps all.
Json deduped_rows_json(const AnalysisResult& result, const DedupeResult& deduped, std::size_t top_k = 0);

/// Result metadata: control mode, resolved thresholds, group sizes, warnings.
Json analysis_metadata_json(const AnalysisResult& result);

struct ReportInputs {
  Json config = Json::object();
  std::vector<BinningSpec> binning;
  std::size_t rejected_test = 0;
  std::size_t rejected_control = 0;
};

/// Full canonical report. Contains no timestamps, so identical inputs give identical bytes.
Json make_report(const AnalysisResult& result, const DedupeResult& deduped, const ReportInputs& inputs);

/// Reads the ranked section of a report for linking. Throws ReportError on an
/// unknown schema version or a malformed document.
RegressionAnalysis regression_from_report(const std::string& regression_id, const Json& report);

/// Fixed-width text table of the first `top_k` rows, as shown on the terminal.
std::string format_table(const Json& rows, std::size_t top_k);

}  // namespace rca
