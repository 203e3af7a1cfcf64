#pragma once

#include <span>
#include <utility>
#include <vector>

#include "itrace/gaze_model.hpp"
#include "itrace/heatmap/config.hpp"
#include "itrace/heatmap/frame.hpp"

namespace itrace::heatmap {

/// Linear fade around a gaze timestamp: max(0, 1 - |dt| / fade_duration).
double temporal_weight(double dt, double fade_duration);

/// Pixel index for a normalized coordinate: min(floor(v * extent), extent - 1).
int pixel_index(double v, int extent);

/// Per-frame scalar attention field prior to color mapping.
struct BrightnessVolume {
  double fps = 0.0;
  int width = 0;
  int height = 0;
  std::vector<ScalarFrame> frames;
};

/// Non-zero cells of one frame, sorted by cell index (y * width + x).
using SparseFrame = std::vector<std::pair<std::size_t, double>>;

/// Computes single frames of the brightness volume on demand from a
/// time-sorted point list. Only points within the fade support of the
/// requested frame are visited.
class FrameAccumulator {
 public:
  FrameAccumulator(std::span<const GazePoint> sorted_points, double fps, double fade_duration_s,
                   Dims dims);

  SparseFrame sparse_frame(int frame) const;
  ScalarFrame dense_frame(int frame) const;

  /// Maximum cell value over frames [0, frame_count).
  double max_over(int frame_count) const;

  Dims dims() const { return dims_; }

 private:
  std::span<const GazePoint> points_;
  double fps_;
  double fade_;
  Dims dims_;
};

/// Materializes the whole volume (ceil(duration * fps) frames).
BrightnessVolume build_brightness_volume(std::span<const GazePoint> points, const RenderConfig& cfg,
                                         double duration_s, Dims dims);

double volume_max(const BrightnessVolume& vol);

/// Global square-root normalization: v -> sqrt(v / M). All-zero volumes pass through.
BrightnessVolume normalize_brightness(const BrightnessVolume& vol);

/// Accumulates every point with weight 1 into a single frame (no fade).
ScalarFrame accumulate_all(std::span<const GazePoint> points, Dims dims);

/// In-place sqrt(v / max) over one frame; no-op when max is zero.
void sqrt_normalize(ScalarFrame& frame, double max_value);

}  // namespace itrace::heatmap
