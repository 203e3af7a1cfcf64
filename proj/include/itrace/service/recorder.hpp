#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include "itrace/heatmap/frame.hpp"
#include "itrace/service/config.hpp"

namespace itrace::service {

/// Seconds on a monotonic clock.
using Clock = std::function<double()>;
Clock steady_clock_seconds();

/// Captures footage between start and stop. `stop` returns the footage path
/// (a frame folder or a container video).
class Recorder {
 public:
  virtual ~Recorder() = default;
  virtual void start(const std::filesystem::path& output) = 0;
  virtual std::filesystem::path stop() = 0;
  virtual RecorderBackend backend() const = 0;
};

/// Writes a timestamp-burned test pattern covering the recorded interval as
/// a frame folder on stop.
class MockRecorder : public Recorder {
 public:
  explicit MockRecorder(Clock clock, heatmap::Dims dims = {320, 180}, double fps = 10.0);
  void start(const std::filesystem::path& output) override;
  std::filesystem::path stop() override;
  RecorderBackend backend() const override { return RecorderBackend::mock_synthetic; }

 private:
  Clock clock_;
  heatmap::Dims dims_;
  double fps_;
  std::filesystem::path output_;
  double started_ = 0.0;
};

/// Runs a shell command ("{output}" substituted with the footage path) and
/// sends it SIGINT on stop.
class CommandRecorder : public Recorder {
 public:
  explicit CommandRecorder(std::string command_template, double stop_timeout_s = 10.0);
  ~CommandRecorder() override;
  void start(const std::filesystem::path& output) override;
  std::filesystem::path stop() override;
  RecorderBackend backend() const override { return RecorderBackend::external_command; }

 private:
  std::string template_;
  double stop_timeout_s_;
  std::filesystem::path output_;
  int pid_ = -1;
};

std::unique_ptr<Recorder> make_recorder(const ServiceConfig& cfg, Clock clock);

}  // namespace itrace::service
