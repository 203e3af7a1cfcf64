#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "itrace/service/config.hpp"
#include "itrace/service/jobs.hpp"
#include "itrace/service/recorder.hpp"

namespace itrace::service {

struct RecorderHandle {
  std::string recording_id;
  double started_at = 0.0;  // server monotonic seconds
  RecorderBackend backend = RecorderBackend::mock_synthetic;
};

struct Upload {
  std::string filename;
  std::string bytes;
};

struct SubmitOutcome {
  std::string job_id;
  /// Set when the caller waited and the job finished within the timeout.
  std::optional<RenderJob> finished;
};

/// Transport-independent service core. Errors surface as the library's
/// exception types; the HTTP layer maps them to status codes.
class SessionService {
 public:
  SessionService(ServiceConfig cfg, std::unique_ptr<Recorder> recorder, Clock clock = steady_clock_seconds());
  ~SessionService();

  const ServiceConfig& config() const { return cfg_; }
  nlohmann::json health() const;

  /// Validates the session and probes the video before queueing anything.
  SubmitOutcome submit_video(const Upload& video, std::string_view gaze, bool background);

  RenderJob job(const std::string& id) const;
  /// Path of a finished job's heatmap. NotFoundError for unknown ids,
  /// ConflictError while running or after failure.
  std::filesystem::path job_result(const std::string& id) const;

  RecorderHandle spatial_start();
  /// Stops the active recording and queues a render of it; returns the job id.
  std::string spatial_stop(std::string_view gaze);

  /// Body: {"dots":[{"x":..,"y":..}], "width":W, "height":H}.
  nlohmann::json alignment_check(const nlohmann::json& request, std::string_view reference_image);

  JobQueue& jobs() { return jobs_; }

 private:
  ServiceConfig cfg_;
  std::unique_ptr<Recorder> recorder_;
  Clock clock_;
  JobQueue jobs_;
  std::mutex recorder_mu_;
  std::optional<RecorderHandle> active_;
  std::uint64_t next_recording_ = 1;
};

}  // namespace itrace::service
