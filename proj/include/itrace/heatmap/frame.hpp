#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace itrace::heatmap {

struct Dims {
  int width = 0;
  int height = 0;
  std::size_t area() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool operator==(const Dims&) const = default;
};

/// Row-major scalar field, one value per pixel.
struct ScalarFrame {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  ScalarFrame() = default;
  ScalarFrame(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  Dims dims() const { return {width, height}; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB raster, row-major, three bytes per pixel.
struct FrameRGB {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  FrameRGB() = default;
  FrameRGB(int w, int h, Rgb fill = {0, 0, 0});

  Dims dims() const { return {width, height}; }
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  bool operator==(const FrameRGB&) const = default;
};

/// Aspect-preserving working size: width capped at `working_width`, both
/// dimensions rounded down to even numbers (minimum 2).
Dims working_dims(Dims source, int working_width);

/// Area-averaging resample. Identity when the sizes match.
FrameRGB resize_area(const FrameRGB& src, Dims target);

/// Removes `top` rows from the top and `bottom` rows from the bottom.
FrameRGB crop_rows(const FrameRGB& src, int top, int bottom);

}  // namespace itrace::heatmap
