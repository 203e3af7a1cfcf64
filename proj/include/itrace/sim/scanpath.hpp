#pragma once

#include <cstdint>
#include <vector>

#include "itrace/gaze_model.hpp"

namespace itrace::sim {

enum class JumpMode { uniform, regions };

struct AttentionRegion {
  Point2 center;
  double radius = 0.02;
  double weight = 1.0;
};

/// Synthetic gaze: lognormal fixations joined by instantaneous saccades.
struct ScanpathModel {
  std::uint64_t seed = 1;
  double fixation_mu = -1.2;    // log-seconds
  double fixation_sigma = 0.5;
  JumpMode jump = JumpMode::uniform;
  std::vector<AttentionRegion> regions;
  /// Probability that a saccade lands in the region it left (regions mode only).
  double region_stickiness = 0.0;
  /// Within-fixation drift speed, normalized units per second.
  double drift_per_s = 0.0;
  double sample_rate_hz = 100.0;

  void validate() const;

  /// Calibrated preset for watching a video: a few small areas of interest
  /// visited in runs. Rates it produces for dwell selection are calibration,
  /// not measurements.
  static ScanpathModel video_viewing(std::uint64_t seed);
};

struct Fixation {
  double start_s = 0.0;
  double duration_s = 0.0;
  Point2 position;
  Point2 velocity;
};

/// Uniformly sampled gaze positions covering [0, duration].
struct Trajectory {
  double sample_rate_hz = 100.0;
  double duration_s = 0.0;
  std::vector<Point2> samples;
  std::vector<Fixation> fixations;

  /// Most recent sample at or before t (clamped to the ends).
  Point2 at(double t) const;
};

Trajectory simulate_scanpath(double duration_s, const ScanpathModel& model);

/// A gaze that never moves.
Trajectory stationary_trajectory(double duration_s, Point2 position, double sample_rate_hz = 100.0);

}  // namespace itrace::sim
