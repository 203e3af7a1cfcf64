#include "itrace/heatmap/frame_source.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "itrace/errors.hpp"

namespace itrace::heatmap {

MemoryFrameSource::MemoryFrameSource(std::vector<FrameRGB> frames, double fps)
    : frames_(std::move(frames)), fps_(fps) {}

Dims MemoryFrameSource::dims() const { return frames_.empty() ? Dims{} : frames_.front().dims(); }

std::optional<FrameRGB> MemoryFrameSource::next() {
  if (cursor_ >= frames_.size()) return std::nullopt;
  return frames_[cursor_++];
}

void MemoryFrameSink::open(Dims d, double f) {
  dims = d;
  fps = f;
  frames.clear();
  closed = false;
}

CroppedSource::CroppedSource(FrameSource& inner, int top, int bottom)
    : inner_(inner), top_(top), bottom_(bottom) {
  if (top < 0 || bottom < 0 || top + bottom >= inner.dims().height) {
    throw ValidationError("crop exceeds frame height");
  }
}

Dims CroppedSource::dims() const {
  Dims d = inner_.dims();
  return {d.width, d.height - top_ - bottom_};
}

std::optional<FrameRGB> CroppedSource::next() {
  auto f = inner_.next();
  if (!f) return std::nullopt;
  return crop_rows(*f, top_, bottom_);
}

TestPatternSource::TestPatternSource(Dims dims, double fps, int frame_count)
    : dims_(dims), fps_(fps), count_(frame_count) {}

std::optional<FrameRGB> TestPatternSource::next() {
  if (cursor_ >= count_) return std::nullopt;
  const int i = cursor_++;
  return make_frame(dims_, i / fps_, i);
}

namespace {

// 3x5 bitmap digits, one row per nibble of 3 bits (MSB = leftmost column).
constexpr unsigned char kDigits[11][5] = {
    {7, 5, 5, 5, 7}, {2, 6, 2, 2, 7}, {7, 1, 7, 4, 7}, {7, 1, 7, 1, 7}, {5, 5, 7, 1, 1},
    {7, 4, 7, 1, 7}, {7, 4, 7, 5, 7}, {7, 1, 1, 1, 1}, {7, 5, 7, 5, 7}, {7, 5, 7, 1, 7},
    {0, 0, 0, 0, 2},  // '.'
};

void draw_glyph(FrameRGB& f, int glyph, int x0, int y0, int scale) {
  for (int row = 0; row < 5; ++row) {
    for (int col = 0; col < 3; ++col) {
      if (!((kDigits[glyph][row] >> (2 - col)) & 1)) continue;
      for (int dy = 0; dy < scale; ++dy) {
        for (int dx = 0; dx < scale; ++dx) {
          int x = x0 + col * scale + dx;
          int y = y0 + row * scale + dy;
          if (x < f.width && y < f.height) f.set(x, y, {255, 255, 255});
        }
      }
    }
  }
}

}  // namespace

FrameRGB TestPatternSource::make_frame(Dims dims, double t_seconds, int index) {
  FrameRGB f(dims.width, dims.height);
  for (int y = 0; y < dims.height; ++y) {
    for (int x = 0; x < dims.width; ++x) {
      auto r = static_cast<std::uint8_t>(255 * x / std::max(1, dims.width - 1));
      auto g = static_cast<std::uint8_t>(255 * y / std::max(1, dims.height - 1));
      auto b = static_cast<std::uint8_t>((index * 4) % 256);
      f.set(x, y, {r, g, b});
    }
  }
  // Timestamp with one decimal, e.g. "12.3".
  const long tenths = std::lround(t_seconds * 10.0);
  std::string text = std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
  const int scale = std::max(1, dims.height / 60);
  int x = scale * 2;
  for (char c : text) {
    draw_glyph(f, c == '.' ? 10 : c - '0', x, scale * 2, scale);
    x += 4 * scale;
  }
  return f;
}

}  // namespace itrace::heatmap
