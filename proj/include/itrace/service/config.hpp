#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "itrace/heatmap/config.hpp"

namespace itrace::service {

enum class RecorderBackend { mock_synthetic, external_command };

struct ServiceConfig {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::filesystem::path output_dir;  // defaults to ~/Desktop/Heatmap
  int workers = 1;
  RecorderBackend recorder = RecorderBackend::mock_synthetic;
  /// Shell command for the external recorder; "{output}" is replaced by the
  /// footage path. The process is stopped with SIGINT.
  std::string recorder_command;
  /// Blocking uploads give up waiting after this long and return the job id.
  double wait_timeout_s = 600.0;
  std::string instance_name = "itrace";
  bool discovery = true;
  heatmap::RenderConfig render;

  void validate() const;
};

/// ~/Desktop/Heatmap, or ./Heatmap when HOME is unset.
std::filesystem::path default_output_dir();

/// Keys accepted everywhere (file, environment, flags), in snake_case:
/// host, port, output_dir, workers, recorder, recorder_command,
/// wait_timeout_s, instance_name, discovery, and the render keys fps,
/// working_width, fade_duration_s, blur_sigma_px, darken_factor,
/// hold_seconds, delay_offset_s, crop_top_px, crop_bottom_px.
const std::vector<std::string>& config_keys();

/// Applies one key. Throws ValidationError for unknown keys or bad values.
void apply_setting(ServiceConfig& cfg, const std::string& key, const std::string& value);

/// Environment lookup, injectable for tests.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

/// defaults < config file (JSON object) < ITRACE_<KEY> environment < flags.
ServiceConfig load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env,
                          const std::map<std::string, std::string>& flags);

}  // namespace itrace::service
