#include "itrace/heatmap/composite.hpp"

#include <algorithm>
#include <cmath>

#include "itrace/errors.hpp"

namespace itrace::heatmap {

FrameRGB composite(const FrameRGB& heat, const ScalarFrame& heat_strength,
                   const FrameRGB& background, double darken_factor) {
  if (heat.dims() != background.dims() || heat.dims() != heat_strength.dims()) {
    throw ValidationError("composite: dimension mismatch");
  }
  FrameRGB out(background.width, background.height);
  const std::size_t n = heat_strength.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::clamp(heat_strength.values[i], 0.0, 1.0);
    for (int c = 0; c < 3; ++c) {
      const std::size_t k = i * 3 + c;
      const double v = background.pixels[k] * darken_factor * (1.0 - a) + heat.pixels[k] * a;
      out.pixels[k] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

}  // namespace itrace::heatmap
