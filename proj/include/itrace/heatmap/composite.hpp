#pragma once

#include "itrace/heatmap/frame.hpp"

namespace itrace::heatmap {

/// out = round(background * darken * (1 - a) + heat * a) per channel, a = heat_strength.
FrameRGB composite(const FrameRGB& heat, const ScalarFrame& heat_strength,
                   const FrameRGB& background, double darken_factor);

}  // namespace itrace::heatmap
