#include "rca/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace rca {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

std::vector<TraceRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return parse_records(in);
  } catch (const IngestError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

// Writes to a temporary sibling and renames, so a failed run leaves no partial file.
void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + path);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void validate(const RunConfig& c) {
  MinSupport::parse(c.min_support);
  if (c.control_min_support) MinSupport::parse(*c.control_min_support);
  if (c.max_len == 0) throw std::invalid_argument("--max-len must be positive");
  if (!(c.similarity_threshold >= 0.0 && c.similarity_threshold <= 1.0))
    throw std::invalid_argument("--similarity must be in [0, 1]");
  if (c.bins.kind == BinRule::Kind::explicit_count && c.bins.count == 0)
    throw std::invalid_argument("--bins must be positive");
}

Json config_json(const RunConfig& c) {
  Json j;
  j["min_support"] = c.min_support;
  if (c.control_min_support) j["control_min_support"] = *c.control_min_support;
  j["max_len"] = c.max_len;
  j["similarity"] = c.similarity_threshold;
  j["control_mode"] = std::string(to_string(c.control_mode));
  j["binning"] = std::string(to_string(c.binning));
  j["bins"] = to_string(c.bins);
  return j;
}

LoadedGroups load_groups(const std::vector<TraceRecord>& test, const std::vector<TraceRecord>& control,
                         BinStrategy strategy, BinRule rule) {
  auto values = collect_numeric_values(test);
  for (auto& [name, v] : collect_numeric_values(control)) {
    auto& dst = values[name];
    dst.insert(dst.end(), v.begin(), v.end());
  }
  BinningSpecs specs;
  LoadedGroups out;
  for (const auto& [name, v] : values) {
    auto spec = compute_bins(v, strategy, rule, name);
    out.binning.push_back(spec);
    specs.emplace(name, std::move(spec));
  }
  auto vocab = std::make_shared<Vocabulary>();
  out.test = ingest_records(test, GroupRole::test, vocab, &specs);
  out.control = ingest_records(control, GroupRole::control, vocab, &specs);
  return out;
}

PipelineOutput run_pipeline(const LoadedGroups& groups, const RunConfig& config) {
  MiningParams params;
  params.min_support = MinSupport::parse(config.min_support);
  params.max_len = config.max_len;
  params.workers = config.workers;
  std::optional<MinSupport> control_support;
  if (config.control_min_support) control_support = MinSupport::parse(*config.control_min_support);

  PipelineOutput out;
  out.result = analyze(groups.test, groups.control, params, config.control_mode, control_support);
  const auto t = Clock::now();
  out.deduped = dedupe(out.result.rows, config.similarity_threshold);
  out.dedupe_ms = ms_since(t);

  ReportInputs inputs;
  inputs.config = config_json(config);
  inputs.binning = groups.binning;
  inputs.rejected_test = groups.test.rejected_records;
  inputs.rejected_control = groups.control.rejected_records;
  out.report = make_report(out.result, out.deduped, inputs);
  return out;
}

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
  LoadedGroups groups;
  try {
    validate(config);
    groups = load_groups(read_records(config.test_path), read_records(config.control_path), config.binning,
                         config.bins);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  if (groups.test.empty()) {
    err << "error: test group is empty\n";
    return kExitEmptyTest;
  }

  try {
    PipelineOutput run = run_pipeline(groups, config);
    for (const auto& w : run.result.warnings) err << "warning: " << w << '\n';
    const std::string table = format_table(run.report["rows"], config.top_k);
    if (!config.output_path.empty()) {
      const std::string body =
          config.format == ReportFormat::json ? run.report.dump(2) + "\n" : format_table(run.report["rows"], 0);
      write_file_atomic(config.output_path, body);
    }
    out << "resolved min_support: " << run.result.resolved_min_support << " of " << run.result.test_size
        << " test traces; " << run.result.rows.size() << " patterns, " << run.deduped.kept.size()
        << " after redundancy filtering\n"
        << table;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}

int cmd_link(const std::vector<std::string>& report_paths, double threshold, const std::string& output_path,
             std::ostream& out, std::ostream& err, int workers) {
  try {
    if (report_paths.empty()) throw std::invalid_argument("no reports given");
    std::vector<RegressionAnalysis> analyses;
    for (const auto& path : report_paths) {
      std::ifstream in(path);
      if (!in) throw std::runtime_error("cannot open " + path);
      Json report;
      try {
        report = Json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ReportError(path + ": " + e.what());
      }
      analyses.push_back(regression_from_report(path, report));
    }
    const GlobalPatternIndex index = build_index(analyses);
    std::vector<RegressionVector> vectors;
    for (const auto& a : analyses) vectors.push_back(encode_regression(a, index));
    const LinkReport links = link_regressions(vectors, threshold, workers);
    const std::string body = to_json(links).dump(2) + "\n";
    if (!output_path.empty()) write_file_atomic(output_path, body);
    else out << body;
    out << links.clusters.size() << " clusters over " << report_paths.size() << " reports\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}

BenchRow run_bench_case(const BenchPreset& preset, int workers, std::uint64_t seed, double budget_seconds) {
  BenchRow row;
  row.preset = preset.name;
  row.traces = preset.traces_per_group;
  row.median_length = preset.median_length;
  row.vocab = preset.vocab_size;
  row.min_support = preset.min_support;
  row.max_len = preset.max_len;
  row.workers = workers;

  const auto start = Clock::now();
  CorpusSpec spec;
  spec.traces_per_group = preset.traces_per_group;
  spec.median_length = preset.median_length;
  spec.vocab_size = preset.vocab_size;
  spec.seed = seed;
  auto t = Clock::now();
  const SyntheticCorpus corpus = generate_corpus(spec);
  row.generate_ms = ms_since(t);

  t = Clock::now();
  const LoadedGroups groups = load_groups(corpus.test, corpus.control, BinStrategy::equal_proportion,
                                          BinRule::sturges());
  row.ingest_ms = ms_since(t);

  RunConfig config;
  config.min_support = preset.min_support;
  config.max_len = preset.max_len;
  config.workers = workers;
  PipelineOutput run = run_pipeline(groups, config);
  row.mine_ms = run.result.timings.mine_ms;
  row.control_ms = run.result.timings.control_ms;
  row.score_ms = run.result.timings.score_ms;
  row.dedupe_ms = run.dedupe_ms;
  row.patterns = run.result.rows.size();
  row.kept = run.deduped.kept.size();
  row.total_ms = ms_since(start);
  if (row.total_ms > budget_seconds * 1000.0) row.status = "timeout";
  row.report = std::move(run.report);
  return row;
}

std::string bench_csv_header() {
  return "preset,traces,median_length,vocab,min_support,max_len,workers,patterns,kept,"
         "generate_ms,ingest_ms,mine_ms,control_ms,score_ms,dedupe_ms,total_ms,status";
}

std::string bench_csv_row(const BenchRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%g,%zu,%d,%zu,%zu,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%s",
                r.preset.c_str(), r.traces, r.median_length, r.vocab, r.min_support, r.max_len, r.workers,
                r.patterns, r.kept, r.generate_ms, r.ingest_ms, r.mine_ms, r.control_ms, r.score_ms,
                r.dedupe_ms, r.total_ms, r.status.c_str());
  return buf;
}

int cmd_bench(const BenchConfig& config, std::ostream& out, std::ostream& err) {
  std::vector<BenchPreset> cases;
  try {
    BenchPreset base = bench_preset(config.preset);
    if (config.traces) base.traces_per_group = *config.traces;
    if (config.median_length) base.median_length = *config.median_length;
    if (config.min_support) base.min_support = *config.min_support;
    if (config.vocab) base.vocab_size = *config.vocab;
    base.max_len = config.max_len;
    if (config.sweep.empty()) {
      cases.push_back(base);
    } else {
      for (double v : config.sweep_values) {
        BenchPreset p = base;
        if (config.sweep == "traces") p.traces_per_group = static_cast<std::size_t>(v);
        else if (config.sweep == "length") p.median_length = static_cast<std::size_t>(v);
        else if (config.sweep == "support") p.min_support = v;
        else throw std::invalid_argument("--sweep must be traces, length or support");
        cases.push_back(p);
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  out << bench_csv_header() << '\n';
  for (const auto& p : cases) {
    try {
      out << bench_csv_row(run_bench_case(p, config.workers, config.seed, config.budget_seconds)) << '\n';
    } catch (const std::exception& e) {
      BenchRow failed;
      failed.preset = p.name;
      failed.traces = p.traces_per_group;
      failed.median_length = p.median_length;
      failed.vocab = p.vocab_size;
      failed.min_support = p.min_support;
      failed.max_len = p.max_len;
      failed.workers = config.workers;
      failed.status = "error";
      err << "bench case failed: " << e.what() << '\n';
      out << bench_csv_row(failed) << '\n';
    }
    out.flush();
  }
  return kExitOk;
}

}  // namespace rca
