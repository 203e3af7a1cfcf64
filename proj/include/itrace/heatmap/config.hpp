#pragma once

#include <optional>

namespace itrace::heatmap {

enum class Normalization { global_sqrt };

/// Every knob of the heatmap pipeline.
struct RenderConfig {
  double fps = 30.0;
  int working_width = 640;
  double fade_duration_s = 0.3;
  /// Unset means 2% of the working width.
  std::optional<double> blur_sigma_px;
  double darken_factor = 0.5;
  double hold_seconds = 3.0;
  Normalization normalization = Normalization::global_sqrt;
  /// Divide the blurred field by the centre gain of the kernel so an isolated
  /// full-strength point keeps strength 1 after blurring (clamped to [0,1]).
  bool rescale_blur_peak = true;

  // Spatial mode only.
  double delay_offset_s = 0.0;
  int crop_top_px = 0;
  int crop_bottom_px = 0;

  double blur_sigma_for(int width) const { return blur_sigma_px.value_or(0.02 * width); }

  /// Throws ValidationError when an invariant does not hold.
  void validate() const;
};

/// ceil(duration * fps), tolerant of products like 0.7 * 10 landing on 7.000000001.
int frame_count_for(double duration_s, double fps);

/// round(hold_seconds * fps)
int hold_frame_count(const RenderConfig& cfg);

}  // namespace itrace::heatmap
