#include "itrace/heatmap/volume.hpp"

#include <algorithm>
#include <cmath>

#include "itrace/errors.hpp"

namespace itrace::heatmap {

double temporal_weight(double dt, double fade_duration) {
  return std::max(0.0, 1.0 - std::abs(dt) / fade_duration);
}

int pixel_index(double v, int extent) {
  int i = static_cast<int>(std::floor(v * extent));
  return std::clamp(i, 0, extent - 1);
}

FrameAccumulator::FrameAccumulator(std::span<const GazePoint> sorted_points, double fps,
                                   double fade_duration_s, Dims dims)
    : points_(sorted_points), fps_(fps), fade_(fade_duration_s), dims_(dims) {
  if (dims.width <= 0 || dims.height <= 0) throw ValidationError("volume dimensions must be non-zero");
  if (!(fps > 0.0)) throw ValidationError("fps must be > 0");
  if (!(fade_duration_s > 0.0)) throw ValidationError("fade_duration_s must be > 0");
}

SparseFrame FrameAccumulator::sparse_frame(int frame) const {
  const double now = static_cast<double>(frame) / fps_;
  auto first = std::lower_bound(points_.begin(), points_.end(), now - fade_,
                                [](const GazePoint& p, double t) { return p.t < t; });
  SparseFrame cells;
  for (auto it = first; it != points_.end() && it->t <= now + fade_; ++it) {
    double w = temporal_weight(now - it->t, fade_);
    if (w <= 0.0) continue;
    std::size_t cell = static_cast<std::size_t>(pixel_index(it->y, dims_.height)) * dims_.width +
                       static_cast<std::size_t>(pixel_index(it->x, dims_.width));
    cells.emplace_back(cell, w);
  }
  std::stable_sort(cells.begin(), cells.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseFrame merged;
  for (const auto& c : cells) {
    if (!merged.empty() && merged.back().first == c.first) {
      merged.back().second += c.second;
    } else {
      merged.push_back(c);
    }
  }
  return merged;
}

ScalarFrame FrameAccumulator::dense_frame(int frame) const {
  ScalarFrame out(dims_.width, dims_.height);
  for (const auto& [cell, v] : sparse_frame(frame)) out.values[cell] = v;
  return out;
}

double FrameAccumulator::max_over(int frame_count) const {
  double m = 0.0;
  for (int f = 0; f < frame_count; ++f) {
    for (const auto& [cell, v] : sparse_frame(f)) m = std::max(m, v);
  }
  return m;
}

BrightnessVolume build_brightness_volume(std::span<const GazePoint> points, const RenderConfig& cfg,
                                         double duration_s, Dims dims) {
  FrameAccumulator acc(points, cfg.fps, cfg.fade_duration_s, dims);
  BrightnessVolume vol;
  vol.fps = cfg.fps;
  vol.width = dims.width;
  vol.height = dims.height;
  const int n = frame_count_for(duration_s, cfg.fps);
  vol.frames.reserve(n);
  for (int f = 0; f < n; ++f) vol.frames.push_back(acc.dense_frame(f));
  return vol;
}

double volume_max(const BrightnessVolume& vol) {
  double m = 0.0;
  for (const auto& frame : vol.frames) {
    for (double v : frame.values) m = std::max(m, v);
  }
  return m;
}

void sqrt_normalize(ScalarFrame& frame, double max_value) {
  if (!(max_value > 0.0)) return;
  for (double& v : frame.values) v = std::sqrt(v / max_value);
}

BrightnessVolume normalize_brightness(const BrightnessVolume& vol) {
  BrightnessVolume out = vol;
  const double m = volume_max(vol);
  for (auto& frame : out.frames) sqrt_normalize(frame, m);
  return out;
}

ScalarFrame accumulate_all(std::span<const GazePoint> points, Dims dims) {
  if (dims.width <= 0 || dims.height <= 0) throw ValidationError("frame dimensions must be non-zero");
  ScalarFrame out(dims.width, dims.height);
  for (const auto& p : points) out.at(pixel_index(p.x, dims.width), pixel_index(p.y, dims.height)) += 1.0;
  return out;
}

}  // namespace itrace::heatmap
