#include "rca/rca_service.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <httplib.h>

namespace rca {

namespace fs = std::filesystem;

std::string_view to_string(JobState state) {
  switch (state) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
  }
  return "?";
}

namespace {

JobState parse_job_state(const std::string& s) {
  if (s == "queued") return JobState::queued;
  if (s == "running") return JobState::running;
  if (s == "done") return JobState::done;
  if (s == "failed") return JobState::failed;
  throw std::invalid_argument("unknown job state " + s);
}

struct FieldError : std::invalid_argument {
  FieldError(std::string f, const std::string& what) : std::invalid_argument(what), field(std::move(f)) {}
  std::string field;
};

RcaService::Response error_response(int status, const std::string& message, const std::string& field = {}) {
  RcaService::Response r;
  r.status = status;
  r.body["error"] = message;
  if (!field.empty()) r.body["field"] = field;
  return r;
}

std::vector<TraceRecord> records_from_json(const Json& value, const std::string& field) {
  if (!value.is_array()) throw FieldError(field, "\"" + field + "\" must be an array of trace records");
  std::ostringstream lines;
  for (const auto& rec : value) lines << rec.dump() << '\n';
  std::istringstream in(lines.str());
  try {
    return parse_records(in);
  } catch (const IngestError& e) {
    throw FieldError(field, std::string(field) + ": record " + std::to_string(e.line()) + ": " + e.what());
  }
}

std::vector<TraceRecord> records_from_file(const Json& value, const std::string& field) {
  if (!value.is_string()) throw FieldError(field, "\"" + field + "\" must be a file path");
  std::ifstream in(value.get<std::string>());
  if (!in) throw FieldError(field, "cannot open " + value.get<std::string>());
  try {
    return parse_records(in);
  } catch (const IngestError& e) {
    throw FieldError(field, e.what());
  }
}

std::vector<TraceRecord> group_from_request(const Json& req, const std::string& name, bool required) {
  if (req.contains(name)) return records_from_json(req[name], name);
  if (req.contains(name + "_path")) return records_from_file(req[name + "_path"], name + "_path");
  if (required) throw FieldError(name, "missing required field \"" + name + "\"");
  return {};
}

RunConfig config_from_request(const Json& params) {
  RunConfig c;
  if (!params.is_object()) throw FieldError("params", "\"params\" must be an object");
  auto number = [&](const char* key) -> std::optional<double> {
    if (!params.contains(key)) return std::nullopt;
    if (!params[key].is_number()) throw FieldError(std::string("params.") + key, std::string(key) + " must be a number");
    return params[key].get<double>();
  };
  auto text = [&](const char* key) -> std::optional<std::string> {
    if (!params.contains(key)) return std::nullopt;
    if (!params[key].is_string()) throw FieldError(std::string("params.") + key, std::string(key) + " must be a string");
    return params[key].get<std::string>();
  };
  try {
    if (auto v = number("min_support")) c.min_support = *v;
    if (auto v = number("control_min_support")) c.control_min_support = *v;
    if (auto v = number("max_len")) {
      if (*v < 1 || *v != static_cast<double>(static_cast<std::size_t>(*v)))
        throw FieldError("params.max_len", "max_len must be a positive integer");
      c.max_len = static_cast<std::size_t>(*v);
    }
    if (auto v = text("control_mode")) c.control_mode = parse_control_mode(*v);
    if (auto v = text("binning")) c.binning = parse_bin_strategy(*v);
    if (params.contains("bins")) {
      const auto& b = params["bins"];
      c.bins = parse_bin_rule(b.is_string() ? b.get<std::string>() : b.dump());
    }
    validate(c);
  } catch (const FieldError&) {
    throw;
  } catch (const std::exception& e) {
    throw FieldError("params", e.what());
  }
  return c;
}

Json stats_json(const PatternStats& row, const Vocabulary& vocab) {
  Json j;
  j["pattern"] = pattern_labels(row.pattern, vocab);
  j["test_ids"] = row.test_ids;
  j["control_ids"] = row.control_ids;
  j["precision"] = row.precision;
  j["recall"] = row.recall;
  j["f1"] = row.f1;
  return j;
}

void write_json(const fs::path& path, const Json& j) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump();
  }
  fs::rename(tmp, path);
}

Json job_status_json(const AnalysisJob& job) {
  Json j;
  j["job_id"] = job.job_id;
  j["state"] = std::string(to_string(job.state));
  j["config"] = job.config;
  j["timings"] = job.timings;
  if (job.state == JobState::failed) j["error"] = job.error;
  if (job.result) j["metadata"] = analysis_metadata_json(*job.result);
  return j;
}

}  // namespace

Json stored_result_json(const AnalysisResult& result) {
  Json j;
  j["metadata"] = analysis_metadata_json(result);
  j["test_trace_ids"] = result.test_trace_ids;
  j["control_trace_ids"] = result.control_trace_ids;
  Json rows = Json::array();
  for (const auto& row : result.rows) rows.push_back(stats_json(row, *result.vocab));
  j["ranked"] = std::move(rows);
  return j;
}

AnalysisResult stored_result_from_json(const Json& j) {
  AnalysisResult r;
  const auto& meta = j.at("metadata");
  r.control_mode = parse_control_mode(meta.at("control_mode").get<std::string>());
  r.resolved_min_support = meta.at("resolved_min_support").get<std::size_t>();
  r.resolved_min_support_control = meta.at("resolved_min_support_control").get<std::size_t>();
  r.test_size = meta.at("test_size").get<std::size_t>();
  r.control_size = meta.at("control_size").get<std::size_t>();
  r.warnings = meta.at("warnings").get<std::vector<std::string>>();
  r.test_trace_ids = j.at("test_trace_ids").get<std::vector<std::string>>();
  r.control_trace_ids = j.at("control_trace_ids").get<std::vector<std::string>>();
  auto vocab = std::make_shared<Vocabulary>();
  for (const auto& row : j.at("ranked")) {
    PatternStats s;
    for (const auto& label : row.at("pattern")) s.pattern.push_back(vocab->intern(label.get<std::string>()).id);
    s.test_ids = row.at("test_ids").get<std::vector<TraceIndex>>();
    s.control_ids = row.at("control_ids").get<std::vector<TraceIndex>>();
    s.precision = row.at("precision").get<double>();
    s.recall = row.at("recall").get<double>();
    s.f1 = row.at("f1").get<double>();
    r.rows.push_back(std::move(s));
  }
  r.vocab = vocab;
  return r;
}

RcaService::RcaService(Options options) : options_(std::move(options)) {
  if (options_.data_dir.empty()) throw std::invalid_argument("service data directory not set");
  fs::create_directories(options_.data_dir);
  load_persisted();
  const std::size_t n = std::max<std::size_t>(1, options_.workers);
  for (std::size_t i = 0; i < n; ++i) threads_.emplace_back([this] { worker_loop(); });
}

RcaService::~RcaService() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  changed_.notify_all();
  for (auto& t : threads_) t.join();
}

std::string RcaService::next_job_id() {
  char buf[32];
  std::snprintf(buf, sizeof buf, "job-%06zu", ++counter_);
  return buf;
}

void RcaService::persist(const AnalysisJob& job) const {
  Json status = job_status_json(job);
  status["idempotency_key"] = job.idempotency_key;
  if (job.result) write_json(options_.data_dir / (job.job_id + ".result.json"), stored_result_json(*job.result));
  write_json(options_.data_dir / (job.job_id + ".json"), status);
}

void RcaService::load_persisted() {
  for (const auto& entry : fs::directory_iterator(options_.data_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() < 5 || name.ends_with(".result.json") || !name.ends_with(".json")) continue;
    try {
      std::ifstream in(entry.path());
      const Json status = Json::parse(in);
      auto job = std::make_shared<AnalysisJob>();
      job->job_id = status.at("job_id").get<std::string>();
      job->state = parse_job_state(status.at("state").get<std::string>());
      job->config = status.at("config");
      job->timings = status.value("timings", Json::object());
      job->error = status.value("error", "");
      job->idempotency_key = status.value("idempotency_key", "");
      if (job->state == JobState::queued || job->state == JobState::running) {
        // Inputs are not persisted, so interrupted jobs cannot resume.
        job->state = JobState::failed;
        job->error = "interrupted by service restart";
      }
      if (job->state == JobState::done) {
        std::ifstream rin(options_.data_dir / (job->job_id + ".result.json"));
        job->result = stored_result_from_json(Json::parse(rin));
      }
      unsigned long long n = 0;
      if (std::sscanf(job->job_id.c_str(), "job-%llu", &n) == 1) counter_ = std::max<std::size_t>(counter_, n);
      if (!job->idempotency_key.empty()) idempotency_[job->idempotency_key] = job->job_id;
      jobs_[job->job_id] = job;
    } catch (const std::exception&) {
      // unreadable entries are skipped
    }
  }
}

RcaService::Response RcaService::submit(const std::string& body, const std::string& idempotency_key) {
  if (body.size() > options_.max_payload_bytes) return error_response(413, "payload exceeds configured limit");

  Request request;
  try {
    Json req = Json::parse(body);
    if (!req.is_object()) throw FieldError("", "request body must be a JSON object");
    request.test = group_from_request(req, "test", true);
    request.control = group_from_request(req, "control", false);
    request.config = config_from_request(req.value("params", Json::object()));
  } catch (const FieldError& e) {
    return error_response(400, e.what(), e.field);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, std::string("invalid JSON: ") + e.what());
  }

  std::lock_guard lock(mutex_);
  if (!idempotency_key.empty()) {
    if (auto it = idempotency_.find(idempotency_key); it != idempotency_.end()) {
      Response r;
      r.status = 202;
      r.body["job_id"] = it->second;
      return r;
    }
  }
  if (queue_.size() >= options_.max_queued) return error_response(429, "analysis queue is full");

  auto job = std::make_shared<AnalysisJob>();
  job->job_id = next_job_id();
  job->config = config_json(request.config);
  job->idempotency_key = idempotency_key;
  jobs_[job->job_id] = job;
  if (!idempotency_key.empty()) idempotency_[idempotency_key] = job->job_id;
  persist(*job);
  queue_.emplace_back(job->job_id, std::move(request));
  changed_.notify_all();

  Response r;
  r.status = 202;
  r.body["job_id"] = job->job_id;
  return r;
}

void RcaService::worker_loop() {
  while (true) {
    std::pair<std::string, Request> item;
    {
      std::unique_lock lock(mutex_);
      changed_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      item = std::move(queue_.front());
      queue_.pop_front();
      auto& job = *jobs_.at(item.first);
      job.state = JobState::running;
      persist(job);
    }
    changed_.notify_all();
    run_job(item.first, std::move(item.second));
  }
}

void RcaService::run_job(const std::string& job_id, Request request) {
  using Clock = std::chrono::steady_clock;
  Json timings;
  std::optional<AnalysisResult> result;
  std::string error;
  try {
    const auto t = Clock::now();
    LoadedGroups groups = load_groups(request.test, request.control, request.config.binning, request.config.bins);
    timings["ingest_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - t).count();
    MiningParams params;
    params.min_support = MinSupport::parse(request.config.min_support);
    params.max_len = request.config.max_len;
    params.workers = options_.mining_workers;
    std::optional<MinSupport> control_support;
    if (request.config.control_min_support) control_support = MinSupport::parse(*request.config.control_min_support);
    result = analyze(groups.test, groups.control, params, request.config.control_mode, control_support);
    timings["mine_ms"] = result->timings.mine_ms;
    timings["control_ms"] = result->timings.control_ms;
    timings["score_ms"] = result->timings.score_ms;
  } catch (const std::exception& e) {
    error = e.what();
    result.reset();
  }

  {
    std::lock_guard lock(mutex_);
    auto& job = *jobs_.at(job_id);
    job.timings = timings;
    if (result) {
      job.result = std::move(result);
      job.state = JobState::done;
    } else {
      job.error = error;
      job.state = JobState::failed;
    }
    persist(job);
  }
  changed_.notify_all();
}

RcaService::Response RcaService::get_job(const std::string& job_id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return error_response(404, "unknown job " + job_id);
  Response r;
  r.body = job_status_json(*it->second);
  return r;
}

RcaService::Response RcaService::get_patterns(const std::string& job_id, std::optional<double> similarity,
                                              std::optional<std::size_t> top_k) const {
  std::shared_ptr<const AnalysisJob> job;
  {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) return error_response(404, "unknown job " + job_id);
    if (it->second->state != JobState::done)
      return error_response(409, "job " + job_id + " is " + std::string(to_string(it->second->state)));
    job = it->second;
  }
  // Stored results are write-once, so reading outside the lock is safe.
  const double threshold = similarity.value_or(kDefaultSimilarityThreshold);
  if (!(threshold >= 0.0 && threshold <= 1.0)) return error_response(400, "similarity must be in [0, 1]", "similarity");
  const AnalysisResult& result = *job->result;
  const DedupeResult deduped = dedupe(result.rows, threshold);
  Response r;
  r.body["job_id"] = job_id;
  r.body["similarity"] = threshold;
  r.body["metadata"] = analysis_metadata_json(result);
  r.body["rows"] = deduped_rows_json(result, deduped, top_k.value_or(0));
  return r;
}

RcaService::Response RcaService::link(const std::string& body) const {
  Json req;
  try {
    req = Json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, std::string("invalid JSON: ") + e.what());
  }
  if (!req.is_object() || !req.contains("job_ids") || !req["job_ids"].is_array() || req["job_ids"].empty())
    return error_response(400, "\"job_ids\" must be a non-empty array", "job_ids");
  double threshold = kDefaultLinkThreshold;
  if (req.contains("threshold")) {
    if (!req["threshold"].is_number() || req["threshold"].get<double>() < 0.0)
      return error_response(400, "threshold must be a non-negative number", "threshold");
    threshold = req["threshold"].get<double>();
  }

  std::vector<RegressionAnalysis> analyses;
  for (const auto& id_json : req["job_ids"]) {
    if (!id_json.is_string()) return error_response(400, "job ids must be strings", "job_ids");
    const std::string id = id_json.get<std::string>();
    std::shared_ptr<const AnalysisJob> job;
    {
      std::lock_guard lock(mutex_);
      auto it = jobs_.find(id);
      if (it == jobs_.end()) return error_response(404, "unknown job " + id);
      if (it->second->state != JobState::done) return error_response(409, "job " + id + " is not done");
      job = it->second;
    }
    analyses.push_back(to_regression(id, *job->result));
  }
  const GlobalPatternIndex index = build_index(analyses);
  std::vector<RegressionVector> vectors;
  for (const auto& a : analyses) vectors.push_back(encode_regression(a, index));
  Response r;
  r.body = to_json(link_regressions(vectors, threshold, options_.mining_workers));
  return r;
}

bool RcaService::wait_for(const std::string& job_id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  return changed_.wait_for(lock, timeout, [&] {
    auto it = jobs_.find(job_id);
    return it != jobs_.end() && (it->second->state == JobState::done || it->second->state == JobState::failed);
  });
}

void RcaService::bind(httplib::Server& server) {
  server.set_payload_max_length(options_.max_payload_bytes);
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_header("X-RCA-Schema", "1");
    res.set_content(r.body.dump(), "application/json");
  };
  server.Post("/v1/analyses", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, submit(req.body, req.get_header_value("Idempotency-Key")));
  });
  server.Get(R"(/v1/analyses/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, get_job(req.matches[1]));
  });
  server.Get(R"(/v1/analyses/([^/]+)/patterns)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    std::optional<double> similarity;
    std::optional<std::size_t> top_k;
    try {
      if (req.has_param("similarity")) similarity = std::stod(req.get_param_value("similarity"));
      if (req.has_param("top_k")) {
        const long long k = std::stoll(req.get_param_value("top_k"));
        if (k < 0) throw std::invalid_argument("negative top_k");
        top_k = static_cast<std::size_t>(k);
      }
    } catch (const std::exception&) {
      reply(res, error_response(400, "similarity and top_k must be numeric"));
      return;
    }
    reply(res, get_patterns(req.matches[1], similarity, top_k));
  });
  server.Post("/v1/links", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, link(req.body));
  });
}

}  // namespace rca
