#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rca/pipeline.hpp"

namespace httplib {
class Server;
}

namespace rca {

enum class JobState { queued, running, done, failed };

std::string_view to_string(JobState state);

struct AnalysisJob {
  std::string job_id;
  JobState state = JobState::queued;
  Json config = Json::object();
  std::optional<AnalysisResult> result;  // present iff done
  std::string error;
  Json timings = Json::object();
  std::string idempotency_key;
};

/// Full ranked result as stored on disk: enough to re-run dedupe and linking.
Json stored_result_json(const AnalysisResult& result);
AnalysisResult stored_result_from_json(const Json& j);

/// Job-based analysis API. Handlers return a status code and JSON body so they
/// can be exercised without a socket; bind() mounts them on an HTTP server.
class RcaService {
 public:
  struct Options {
    std::filesystem::path data_dir;
    std::size_t workers = 2;
    std::size_t max_queued = 64;
    std::size_t max_payload_bytes = 64u << 20;
    int mining_workers = 0;
  };

  struct Response {
    int status = 200;
    Json body = Json::object();
  };

  explicit RcaService(Options options);
  ~RcaService();
  RcaService(const RcaService&) = delete;
  RcaService& operator=(const RcaService&) = delete;

  /// POST /v1/analyses
  Response submit(const std::string& body, const std::string& idempotency_key = {});
  /// GET /v1/analyses/{id}
  Response get_job(const std::string& job_id) const;
  /// GET /v1/analyses/{id}/patterns
  Response get_patterns(const std::string& job_id, std::optional<double> similarity,
                        std::optional<std::size_t> top_k) const;
  /// POST /v1/links
  Response link(const std::string& body) const;

  /// Blocks until the job leaves queued/running or the timeout elapses.
  bool wait_for(const std::string& job_id, std::chrono::milliseconds timeout) const;

  void bind(httplib::Server& server);

 private:
  struct Request {
    std::vector<TraceRecord> test;
    std::vector<TraceRecord> control;
    RunConfig config;
  };

  void worker_loop();
  void run_job(const std::string& job_id, Request request);
  void persist(const AnalysisJob& job) const;
  void load_persisted();
  std::string next_job_id();

  Options options_;
  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::map<std::string, std::shared_ptr<AnalysisJob>> jobs_;
  std::map<std::string, std::string> idempotency_;
  std::deque<std::pair<std::string, Request>> queue_;
  std::vector<std::thread> threads_;
  bool stopping_ = false;
  std::size_t counter_ = 0;
};

}  // namespace rca
