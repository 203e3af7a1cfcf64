#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "itrace/gaze_model.hpp"
#include "itrace/sim/scanpath.hpp"

namespace itrace::sim {

enum class SimMethod { turbo, dwell, pinch };

std::string_view to_string(SimMethod m);
std::optional<SimMethod> parse_sim_method(std::string_view text);
/// Label used when grouping simulated sessions with real ones: turbo clicking
/// is what a controller does, dwell is dwell, pinch is pinch.
std::string_view group_label(SimMethod m);

struct TurboParams {
  double rate_hz = 16.7;
  double rate_jitter_fraction = 0.05;
  /// Long-run fraction of time the button is held.
  double hold_duty_cycle = 1.0;
  /// Mean length of one hold + release cycle when duty < 1.
  double hold_cycle_s = 4.0;
};

struct DwellParams {
  double dwell_time_s = 1.4;
  double movement_tolerance = 0.05;  // normalized radius
  double refractory_s = 0.0;
};

struct PinchParams {
  double base_rate_hz = 6.8;
  double fatigue_halflife_s = 120.0;  // infinity disables fatigue
};

/// Duty cycle reproducing the in-video controller rate at the default turbo rate.
inline constexpr double kVideoControllerDuty = 14.22 / 16.7;

struct ClickMethodModel {
  SimMethod method = SimMethod::turbo;
  TurboParams turbo;
  DwellParams dwell;
  PinchParams pinch;

  void validate() const;
};

/// Periodic clicks with Gaussian interval jitter while the button is held.
std::vector<GazePoint> simulate_turbo(double duration_s, const Trajectory& gaze,
                                      const TurboParams& params, std::uint64_t seed);

/// Fires when gaze stays within the tolerance radius of an anchor for the
/// dwell time. Leaving the radius moves the anchor and restarts the timer;
/// firing restarts the timer after the refractory period.
std::vector<GazePoint> simulate_dwell(double duration_s, const Trajectory& gaze,
                                      const DwellParams& params);

/// Poisson clicks whose rate halves every fatigue half-life.
std::vector<GazePoint> simulate_pinch(double duration_s, const Trajectory& gaze,
                                      const PinchParams& params, std::uint64_t seed);

std::vector<GazePoint> simulate_clicks(double duration_s, const Trajectory& gaze,
                                       const ClickMethodModel& model, std::uint64_t seed);

/// Everything needed to reproduce one simulated user.
struct SimulationRequest {
  ClickMethodModel model;
  ScanpathModel scanpath;
  double duration_s = 60.0;
  std::string user_id = "sim";
  std::string video_name = "synthetic.mp4";
};

/// Scanpath plus clicks, packaged as a session with click_method = simulated.
GazeSession simulate_session(const SimulationRequest& request);

/// Sidecar config echo, and its inverse.
nlohmann::json to_json(const SimulationRequest& request);
SimulationRequest simulation_from_json(const nlohmann::json& doc);

}  // namespace itrace::sim
