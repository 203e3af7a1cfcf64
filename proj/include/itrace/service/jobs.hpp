#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace itrace::service {

enum class JobState { queued, running, done, failed };

std::string_view to_string(JobState s);

struct RenderJob {
  std::string job_id;
  JobState state = JobState::queued;
  double progress = 0.0;
  std::filesystem::path result_path;
  std::string error_message;

  bool finished() const { return state == JobState::done || state == JobState::failed; }
};

nlohmann::json to_json(const RenderJob& job);

/// Work item: reports progress in [0,1] through the callback and returns the
/// result path. Throwing marks the job failed with the exception message.
using JobWork = std::function<std::filesystem::path(const std::function<void(double)>& progress)>;

/// FIFO queue with a fixed worker pool. The registry lives in memory only.
class JobQueue {
 public:
  explicit JobQueue(int workers = 1);
  ~JobQueue();
  JobQueue(const JobQueue&) = delete;
  JobQueue& operator=(const JobQueue&) = delete;

  std::string submit(JobWork work);
  /// Same, under an id from new_id() so callers can prepare job-scoped files first.
  void submit(const std::string& id, JobWork work);
  std::string new_id();
  std::optional<RenderJob> get(const std::string& id) const;
  /// Blocks until the job finishes or the timeout passes; returns its state then.
  std::optional<RenderJob> wait(const std::string& id, std::chrono::duration<double> timeout) const;
  std::vector<RenderJob> list() const;

  /// Finishes queued work, then joins the workers. Later submits throw.
  void shutdown();

 private:
  void worker_loop();
  void update(const std::string& id, const std::function<void(RenderJob&)>& fn);

  mutable std::mutex mu_;
  mutable std::condition_variable changed_;
  std::condition_variable work_ready_;
  std::map<std::string, RenderJob> jobs_;
  std::deque<std::pair<std::string, JobWork>> pending_;
  std::vector<std::thread> workers_;
  std::uint64_t next_id_ = 1;
  bool stopping_ = false;
};

}  // namespace itrace::service
