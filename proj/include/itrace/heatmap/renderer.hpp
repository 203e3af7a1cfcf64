#pragma once

#include <functional>
#include <span>

#include "itrace/gaze_model.hpp"
#include "itrace/heatmap/blur.hpp"
#include "itrace/heatmap/config.hpp"
#include "itrace/heatmap/frame.hpp"
#include "itrace/heatmap/frame_source.hpp"
#include "itrace/heatmap/volume.hpp"

namespace itrace::heatmap {

/// Turns a (sparse) brightness frame into the overlay strength in [0,1]:
/// sqrt-normalize against `max_value`, blur, optionally rescale by the kernel
/// centre gain, clamp.
class HeatStrength {
 public:
  HeatStrength(const RenderConfig& cfg, Dims dims);

  ScalarFrame from_sparse(const SparseFrame& cells, double max_value) const;
  ScalarFrame from_dense(const ScalarFrame& brightness, double max_value) const;

  const GaussianBlur& blur() const { return blur_; }

 private:
  ScalarFrame finish(ScalarFrame normalized) const;

  Dims dims_;
  GaussianBlur blur_;
  bool rescale_;
};

/// Hooks into intermediate pipeline state; all optional.
struct RenderObserver {
  /// Pre-colormap overlay strength of every heat frame, in output order.
  std::function<void(int frame, const ScalarFrame& strength)> on_heat_strength;
  /// Cumulative accumulation before normalization.
  std::function<void(const ScalarFrame& raw)> on_cumulative_raw;
  /// Fraction of output frames written, non-decreasing, ends at 1.
  std::function<void(double)> on_progress;
};

struct RenderStats {
  Dims dims;
  double fps = 0.0;
  int heat_frames = 0;
  int hold_frames = 0;
  double global_max = 0.0;
};

/// Builds the cumulative summary frame over `final_background` (already at
/// working size): every point weighted 1, then the same normalize, blur,
/// color-map and composite chain as the heat frames.
FrameRGB cumulative_frame(std::span<const GazePoint> points, const RenderConfig& cfg,
                          const FrameRGB& final_background, ScalarFrame* raw_out = nullptr);

/// Streaming heatmap renderer.
///
/// The full brightness volume is never materialized: frame f only depends
/// on points with |f / fps - t| < fade, so each frame is accumulated from a
/// binary-searched slice of the time-sorted points. A first pass over those
/// slices finds the global maximum for normalization; the second pass
/// renders and writes frames. Background frames are resampled to the output
/// rate (nearest earlier source frame) and downscaled to the working size.
///
/// One render at a time per instance.
class HeatmapRenderer {
 public:
  explicit HeatmapRenderer(RenderConfig cfg);

  /// `points` must be validated (sorted by t).
  RenderStats render(FrameSource& source, std::span<const GazePoint> points, FrameSink& sink,
                     const RenderObserver& observer = {});

  const RenderConfig& config() const { return cfg_; }

 private:
  RenderConfig cfg_;
};

}  // namespace itrace::heatmap
