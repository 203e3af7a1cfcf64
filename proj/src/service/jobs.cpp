#include "itrace/service/jobs.hpp"

#include <algorithm>
#include <random>

#include <fmt/format.h>

#include "itrace/errors.hpp"

namespace itrace::service {

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
  }
  return "queued";
}

nlohmann::json to_json(const RenderJob& job) {
  nlohmann::json j = {
      {"job_id", job.job_id},
      {"state", std::string(to_string(job.state))},
      {"progress", job.progress},
      {"result_path", job.state == JobState::done ? nlohmann::json(job.result_path.string()) : nlohmann::json()},
      {"error_message", job.state == JobState::failed ? nlohmann::json(job.error_message) : nlohmann::json()},
  };
  return j;
}

JobQueue::JobQueue(int workers) {
  if (workers < 1) throw ValidationError("workers must be >= 1");
  for (int i = 0; i < workers; ++i) workers_.emplace_back([this] { worker_loop(); });
}

JobQueue::~JobQueue() { shutdown(); }

std::string JobQueue::new_id() {
  std::lock_guard lock(mu_);
  // Counter keeps ids unique; the random tag keeps them from being guessable across restarts.
  static thread_local std::mt19937 tag_rng(std::random_device{}());
  return fmt::format("{:06d}-{:06x}", next_id_++, tag_rng() & 0xffffff);
}

std::string JobQueue::submit(JobWork work) {
  const std::string id = new_id();
  submit(id, std::move(work));
  return id;
}

void JobQueue::submit(const std::string& id, JobWork work) {
  std::lock_guard lock(mu_);
  if (stopping_) throw Error("job queue is shut down");
  if (jobs_.count(id) != 0) throw ConflictError(fmt::format("job {} already exists", id));
  jobs_[id] = RenderJob{id, JobState::queued, 0.0, {}, {}};
  pending_.emplace_back(id, std::move(work));
  work_ready_.notify_one();
  changed_.notify_all();
}

std::optional<RenderJob> JobQueue::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

std::optional<RenderJob> JobQueue::wait(const std::string& id, std::chrono::duration<double> timeout) const {
  std::unique_lock lock(mu_);
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(timeout);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) return std::nullopt;
  changed_.wait_until(lock, deadline, [&] { return it->second.finished(); });
  return it->second;
}

std::vector<RenderJob> JobQueue::list() const {
  std::lock_guard lock(mu_);
  std::vector<RenderJob> out;
  for (const auto& [_, job] : jobs_) out.push_back(job);
  return out;
}

void JobQueue::shutdown() {
  {
    std::lock_guard lock(mu_);
    if (stopping_ && workers_.empty()) return;
    stopping_ = true;
  }
  work_ready_.notify_all();
  for (auto& w : workers_) {
    if (w.joinable()) w.join();
  }
  workers_.clear();
}

void JobQueue::update(const std::string& id, const std::function<void(RenderJob&)>& fn) {
  std::lock_guard lock(mu_);
  fn(jobs_.at(id));
  changed_.notify_all();
}

void JobQueue::worker_loop() {
  for (;;) {
    std::pair<std::string, JobWork> item;
    {
      std::unique_lock lock(mu_);
      work_ready_.wait(lock, [&] { return stopping_ || !pending_.empty(); });
      if (pending_.empty()) return;
      item = std::move(pending_.front());
      pending_.pop_front();
      jobs_.at(item.first).state = JobState::running;
      changed_.notify_all();
    }
    const std::string& id = item.first;
    auto progress = [&](double p) {
      update(id, [&](RenderJob& j) { j.progress = std::max(j.progress, std::clamp(p, 0.0, 1.0)); });
    };
    try {
      const auto path = item.second(progress);
      update(id, [&](RenderJob& j) {
        j.result_path = path;
        j.progress = 1.0;
        j.state = JobState::done;
      });
    } catch (const std::exception& e) {
      update(id, [&](RenderJob& j) {
        j.error_message = e.what();
        j.state = JobState::failed;
      });
    }
  }
}

}  // namespace itrace::service
