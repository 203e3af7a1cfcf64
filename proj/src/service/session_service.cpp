#include "itrace/service/session_service.hpp"

#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "itrace/errors.hpp"
#include "itrace/service/alignment.hpp"
#include "itrace/session_io.hpp"
#include "itrace/video/frame_folder.hpp"
#include "itrace/video/render_video.hpp"
#include "itrace/video/video_file.hpp"

namespace fs = std::filesystem;

namespace itrace::service {

SessionService::SessionService(ServiceConfig cfg, std::unique_ptr<Recorder> recorder, Clock clock)
    : cfg_(std::move(cfg)), recorder_(std::move(recorder)), clock_(std::move(clock)), jobs_(cfg_.workers) {
  cfg_.validate();
}

SessionService::~SessionService() { jobs_.shutdown(); }

nlohmann::json SessionService::health() const { return {{"status", "ok"}, {"api", 1}}; }

namespace {

JobWork render_work(fs::path source, GazeSession session, heatmap::RenderConfig cfg, fs::path out_dir) {
  return [source = std::move(source), session = std::move(session), cfg, out_dir = std::move(out_dir)](
             const std::function<void(double)>& progress) {
    heatmap::RenderObserver obs;
    obs.on_progress = progress;
    const auto out = video::render_heatmap_video(source, session, cfg, out_dir, video::OutputFormat::video, obs);
    spdlog::info("rendered {} ({} points, {} dropped)", out.heatmap.string(), out.rendered_points,
                 out.dropped_points);
    return out.heatmap;
  };
}

}  // namespace

SubmitOutcome SessionService::submit_video(const Upload& video, std::string_view gaze, bool background) {
  GazeSession session = read_session(gaze);
  if (video.bytes.empty()) throw DecodeError("empty video upload");

  const std::string id = jobs_.new_id();
  const fs::path job_dir = cfg_.output_dir / id;
  std::string name = video.filename.empty() ? session.video.name : video.filename;
  name = video::sanitize_id(fs::path(name).filename().string());
  const fs::path input = job_dir / "input" / name;
  fs::create_directories(input.parent_path());
  {
    std::ofstream out(input, std::ios::binary);
    out.write(video.bytes.data(), static_cast<std::streamsize>(video.bytes.size()));
    if (!out) throw Error(fmt::format("cannot store upload at {}", input.string()));
  }
  try {
    video::VideoFileSource probe(input);
  } catch (const DecodeError&) {
    std::error_code ec;
    fs::remove_all(job_dir, ec);
    throw;
  }

  jobs_.submit(id, render_work(input, std::move(session), cfg_.render, job_dir));
  SubmitOutcome outcome{id, std::nullopt};
  if (!background) {
    auto job = jobs_.wait(id, std::chrono::duration<double>(cfg_.wait_timeout_s));
    if (job && job->finished()) outcome.finished = job;
  }
  return outcome;
}

RenderJob SessionService::job(const std::string& id) const {
  auto job = jobs_.get(id);
  if (!job) throw NotFoundError(fmt::format("no job '{}'", id));
  return *job;
}

fs::path SessionService::job_result(const std::string& id) const {
  const RenderJob j = job(id);
  if (j.state == JobState::failed) throw ConflictError(fmt::format("job {} failed: {}", id, j.error_message));
  if (j.state != JobState::done) throw ConflictError(fmt::format("job {} is {}", id, to_string(j.state)));
  return j.result_path;
}

RecorderHandle SessionService::spatial_start() {
  std::lock_guard lock(recorder_mu_);
  if (active_) throw ConflictError(fmt::format("recording {} already active", active_->recording_id));
  RecorderHandle h;
  h.recording_id = fmt::format("rec{:04d}", next_recording_++);
  h.backend = recorder_->backend();
  const fs::path dir = cfg_.output_dir / "recordings";
  fs::create_directories(dir);
  const std::string file = "recording_" + h.recording_id;
  recorder_->start(h.backend == RecorderBackend::mock_synthetic ? dir / file : dir / (file + ".mp4"));
  h.started_at = clock_();
  active_ = h;
  return h;
}

std::string SessionService::spatial_stop(std::string_view gaze) {
  std::lock_guard lock(recorder_mu_);
  if (!active_) throw ConflictError("no active recording");
  GazeSession session = read_session(gaze);
  session.mode = CaptureMode::spatial;

  std::optional<fs::path> footage;
  std::string failure;
  try {
    footage = recorder_->stop();
  } catch (const std::exception& e) {
    failure = e.what();
  }
  active_.reset();

  const std::string id = jobs_.new_id();
  if (!footage) {
    jobs_.submit(id, [failure](const std::function<void(double)>&) -> fs::path {
      throw RenderError("record", failure);
    });
    return id;
  }
  jobs_.submit(id, render_work(*footage, std::move(session), cfg_.render, cfg_.output_dir / id));
  return id;
}

nlohmann::json SessionService::alignment_check(const nlohmann::json& request, std::string_view reference_image) {
  std::vector<Point2> dots;
  heatmap::Dims dims;
  try {
    for (const auto& d : request.at("dots")) dots.push_back({d.at("x").get<double>(), d.at("y").get<double>()});
    dims = {request.at("width").get<int>(), request.at("height").get<int>()};
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("alignment request: {}", e.what()));
  }
  const auto reference = video::decode_image(reference_image);
  return to_json(service::alignment_check(dots, reference, dims));
}

}  // namespace itrace::service
