#include "itrace/service/recorder.hpp"

#include <chrono>
#include <csignal>
#include <cstring>
#include <thread>

#include <spawn.h>
#include <sys/wait.h>

#include <fmt/format.h>

#include "itrace/errors.hpp"
#include "itrace/heatmap/config.hpp"
#include "itrace/heatmap/frame_source.hpp"
#include "itrace/video/frame_folder.hpp"

extern char** environ;

namespace fs = std::filesystem;

namespace itrace::service {

Clock steady_clock_seconds() {
  return [] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
  };
}

MockRecorder::MockRecorder(Clock clock, heatmap::Dims dims, double fps)
    : clock_(std::move(clock)), dims_(dims), fps_(fps) {}

void MockRecorder::start(const fs::path& output) {
  output_ = output;
  started_ = clock_();
}

fs::path MockRecorder::stop() {
  const double elapsed = clock_() - started_;
  const int frames = std::max(1, heatmap::frame_count_for(elapsed, fps_));
  heatmap::TestPatternSource pattern(dims_, fps_, frames);
  video::FrameFolderSink sink(output_);
  sink.open(dims_, fps_);
  while (auto frame = pattern.next()) sink.write(*frame);
  sink.close();
  return output_;
}

CommandRecorder::CommandRecorder(std::string command_template, double stop_timeout_s)
    : template_(std::move(command_template)), stop_timeout_s_(stop_timeout_s) {}

CommandRecorder::~CommandRecorder() {
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
}

void CommandRecorder::start(const fs::path& output) {
  if (pid_ > 0) throw ConflictError("recorder already running");
  output_ = output;
  std::string cmd = template_;
  const std::string quoted = "'" + output.string() + "'";
  for (auto pos = cmd.find("{output}"); pos != std::string::npos; pos = cmd.find("{output}", pos)) {
    cmd.replace(pos, 8, quoted);
    pos += quoted.size();
  }
  // exec replaces the shell so the signal reaches the capture process itself.
  const std::string script = "exec " + cmd;
  const char* argv[] = {"/bin/sh", "-c", script.c_str(), nullptr};
  pid_t pid = -1;
  const int rc = ::posix_spawn(&pid, "/bin/sh", nullptr, nullptr, const_cast<char**>(argv), environ);
  if (rc != 0) throw Error(fmt::format("cannot start recorder: {}", std::strerror(rc)));
  pid_ = pid;
}

fs::path CommandRecorder::stop() {
  if (pid_ <= 0) throw ConflictError("recorder not running");
  ::kill(pid_, SIGINT);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(stop_timeout_s_);
  int status = 0;
  for (;;) {
    const pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_) break;
    if (std::chrono::steady_clock::now() > deadline) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  pid_ = -1;
  if (!fs::exists(output_)) {
    throw RenderError("record", fmt::format("recorder produced no footage at {}", output_.string()));
  }
  return output_;
}

std::unique_ptr<Recorder> make_recorder(const ServiceConfig& cfg, Clock clock) {
  if (cfg.recorder == RecorderBackend::external_command) {
    return std::make_unique<CommandRecorder>(cfg.recorder_command);
  }
  return std::make_unique<MockRecorder>(std::move(clock));
}

}  // namespace itrace::service
