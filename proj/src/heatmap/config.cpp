#include "itrace/heatmap/config.hpp"

#include <cmath>

#include "itrace/errors.hpp"

namespace itrace::heatmap {

void RenderConfig::validate() const {
  if (!(fps > 0.0) || !std::isfinite(fps)) throw ValidationError("fps must be > 0");
  if (working_width < 2) throw ValidationError("working_width must be >= 2");
  if (!(fade_duration_s > 0.0)) throw ValidationError("fade_duration_s must be > 0");
  if (blur_sigma_px && !(*blur_sigma_px >= 0.0)) throw ValidationError("blur_sigma_px must be >= 0");
  if (!(darken_factor > 0.0 && darken_factor <= 1.0)) {
    throw ValidationError("darken_factor must be in (0,1]");
  }
  if (!(hold_seconds >= 0.0)) throw ValidationError("hold_seconds must be >= 0");
  if (!std::isfinite(delay_offset_s)) throw ValidationError("delay_offset_s must be finite");
  if (crop_top_px < 0 || crop_bottom_px < 0) throw ValidationError("crops must be >= 0");
}

int frame_count_for(double duration_s, double fps) {
  if (!(duration_s > 0.0)) return 0;
  return static_cast<int>(std::ceil(duration_s * fps - 1e-9));
}

int hold_frame_count(const RenderConfig& cfg) {
  return static_cast<int>(std::lround(cfg.hold_seconds * cfg.fps));
}

}  // namespace itrace::heatmap
