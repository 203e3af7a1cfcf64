#pragma once

#include <array>

#include "itrace/heatmap/frame.hpp"

namespace itrace::heatmap {

/// The standard 256-entry inferno table, 8 bits per channel.
const std::array<Rgb, 256>& inferno_table();

/// Linear interpolation between neighbouring table entries; v is clamped to [0,1].
Rgb inferno(double v);

FrameRGB apply_colormap(const ScalarFrame& field);

}  // namespace itrace::heatmap
