// rca: batch root-cause analysis over test/control trace groups.
//
//   rca analyze --test T.jsonl --control C.jsonl [--min-support 0.05] [--out report.json]
//   rca link report1.json report2.json ... [--threshold 0.1] [--out clusters.json]
//   rca bench [--preset easy|medium] [--sweep traces --values 1000,2000]
//   rca serve [--port 8080] [--data-dir ./rca-data]

#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "rca/pipeline.hpp"
#include "rca/rca_service.hpp"

namespace {

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical root-cause analysis over event traces"};
  app.require_subcommand(1);

  rca::RunConfig run;
  std::string min_support_text = "0.05";
  double control_min_support = 0.0;
  std::string control_mode = "exact";
  std::string binning = "equal_proportion";
  std::string bins = "sturges";
  std::string format = "json";
  auto* analyze = app.add_subcommand("analyze", "Mine, rank and de-duplicate patterns of a test group");
  analyze->add_option("--test", run.test_path, "Test group (JSON Lines)")->required();
  analyze->add_option("--control", run.control_path, "Control group (JSON Lines)")->required();
  analyze->add_option("--min-support", min_support_text, "Fraction if < 1, absolute trace count otherwise");
  auto* control_support_opt =
      analyze->add_option("--control-min-support", control_min_support, "Control mining threshold (faithful mode)");
  analyze->add_option("--max-len", run.max_len, "Maximum pattern length");
  analyze->add_option("--similarity", run.similarity_threshold, "Redundancy threshold (Jaccard) in [0,1]");
  analyze->add_option("--control-mode", control_mode, "exact | algorithm_faithful");
  analyze->add_option("--binning", binning, "equal_proportion | equal_width | kbins");
  analyze->add_option("--bins", bins, "sturges | fd | <count>");
  analyze->add_option("--format", format, "Report file format: json | table");
  analyze->add_option("--out", run.output_path, "Report output path");
  analyze->add_option("--top-k", run.top_k, "Rows printed to standard output");
  analyze->add_option("--workers", run.workers, "Mining threads (0 = all cores)");

  std::vector<std::string> reports;
  double link_threshold = rca::kDefaultLinkThreshold;
  std::string link_out;
  int link_workers = 0;
  auto* link = app.add_subcommand("link", "Cluster regressions by cosine distance of their pattern statistics");
  link->add_option("reports", reports, "Reports written by `rca analyze`")->required();
  link->add_option("--threshold", link_threshold, "Cosine distance threshold");
  link->add_option("--out", link_out, "Cluster report path (default: stdout)");
  link->add_option("--workers", link_workers, "Distance threads (0 = all cores)");

  rca::BenchConfig bench;
  std::size_t bench_traces = 0, bench_length = 0, bench_vocab = 0;
  double bench_support = 0.0;
  auto* bench_cmd = app.add_subcommand("bench", "Time the pipeline on synthetic corpora and emit CSV");
  bench_cmd->add_option("--preset", bench.preset, "easy | medium");
  auto* traces_opt = bench_cmd->add_option("--traces", bench_traces, "Traces per group");
  auto* length_opt = bench_cmd->add_option("--length", bench_length, "Median trace length");
  auto* support_opt = bench_cmd->add_option("--min-support", bench_support, "Minimum support");
  auto* vocab_opt = bench_cmd->add_option("--vocab", bench_vocab, "Noise vocabulary size");
  bench_cmd->add_option("--max-len", bench.max_len, "Maximum pattern length");
  bench_cmd->add_option("--workers", bench.workers, "Mining threads (0 = all cores)");
  bench_cmd->add_option("--seed", bench.seed, "Generator seed");
  bench_cmd->add_option("--budget", bench.budget_seconds, "Seconds before a run is recorded as a timeout");
  bench_cmd->add_option("--sweep", bench.sweep, "traces | length | support");
  bench_cmd->add_option("--values", bench.sweep_values, "Sweep values")->delimiter(',');

  int port = 8080;
  std::string host = "127.0.0.1";
  rca::RcaService::Options service;
  service.data_dir = "rca-data";
  std::string data_dir = "rca-data";
  auto* serve = app.add_subcommand("serve", "Run the HTTP analysis service");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--data-dir", data_dir, "Job storage directory");
  serve->add_option("--workers", service.workers, "Concurrent analysis jobs");
  serve->add_option("--max-queued", service.max_queued, "Queued jobs before returning 429");
  serve->add_option("--max-payload", service.max_payload_bytes, "Request size limit in bytes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : rca::kExitError;
  }

  if (analyze->parsed()) {
    try {
      run.min_support = std::stod(min_support_text);
      if (*control_support_opt) run.control_min_support = control_min_support;
      run.control_mode = rca::parse_control_mode(control_mode);
      run.binning = rca::parse_bin_strategy(binning);
      run.bins = rca::parse_bin_rule(bins);
      if (format == "json") run.format = rca::ReportFormat::json;
      else if (format == "table") run.format = rca::ReportFormat::table;
      else throw std::invalid_argument("--format must be json or table");
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return rca::kExitError;
    }
    return rca::cmd_analyze(run, std::cout, std::cerr);
  }
  if (link->parsed()) return rca::cmd_link(reports, link_threshold, link_out, std::cout, std::cerr, link_workers);
  if (bench_cmd->parsed()) {
    if (*traces_opt) bench.traces = bench_traces;
    if (*length_opt) bench.median_length = bench_length;
    if (*support_opt) bench.min_support = bench_support;
    if (*vocab_opt) bench.vocab = bench_vocab;
    return rca::cmd_bench(bench, std::cout, std::cerr);
  }
  if (serve->parsed()) {
    try {
      service.data_dir = data_dir;
      rca::RcaService svc(service);
      httplib::Server server;
      svc.bind(server);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << host << ":" << port << '\n';
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ":" << port << '\n';
        return rca::kExitError;
      }
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return rca::kExitError;
    }
  }
  return rca::kExitOk;
}
