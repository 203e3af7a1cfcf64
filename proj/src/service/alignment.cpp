#include "itrace/service/alignment.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "itrace/errors.hpp"

namespace itrace::service {

namespace {

Point2 to_pixels(Point2 p, heatmap::Dims dims) {
  // Same mapping as the heatmap accumulator: cell index, then its centre.
  const double x = std::min(std::floor(p.x * dims.width), dims.width - 1.0);
  const double y = std::min(std::floor(p.y * dims.height), dims.height - 1.0);
  return {x, y};
}

double luma(heatmap::Rgb c) { return (c[0] + c[1] + c[2]) / 3.0; }

std::optional<Point2> centroid(const heatmap::FrameRGB& f, double cx, double cy, int window,
                               double threshold) {
  const int x0 = std::max(0, static_cast<int>(cx) - window);
  const int x1 = std::min(f.width - 1, static_cast<int>(cx) + window);
  const int y0 = std::max(0, static_cast<int>(cy) - window);
  const int y1 = std::min(f.height - 1, static_cast<int>(cy) + window);
  double sw = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double w = luma(f.at(x, y));
      if (w < threshold) continue;
      sw += w;
      sx += w * x;
      sy += w * y;
    }
  }
  if (sw <= 0.0) return std::nullopt;
  return Point2{sx / sw, sy / sw};
}

}  // namespace

heatmap::FrameRGB render_dots(const std::vector<Point2>& dots, heatmap::Dims dims, int radius) {
  if (dims.width <= 0 || dims.height <= 0) throw ValidationError("alignment frame dims must be > 0");
  heatmap::FrameRGB frame(dims.width, dims.height);
  const int r2 = radius * radius;
  for (const auto& d : dots) {
    if (!(d.x >= 0.0 && d.x <= 1.0 && d.y >= 0.0 && d.y <= 1.0)) {
      throw ValidationError(fmt::format("dot ({}, {}) is not normalized", d.x, d.y));
    }
    const Point2 c = to_pixels(d, dims);
    const int cx = static_cast<int>(c.x);
    const int cy = static_cast<int>(c.y);
    for (int y = std::max(0, cy - radius); y <= std::min(dims.height - 1, cy + radius); ++y) {
      for (int x = std::max(0, cx - radius); x <= std::min(dims.width - 1, cx + radius); ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r2) frame.set(x, y, {255, 255, 255});
      }
    }
  }
  return frame;
}

AlignmentReport alignment_check(const std::vector<Point2>& dots, const heatmap::FrameRGB& reference,
                                heatmap::Dims dims, int radius, int search_radius_px) {
  if (reference.dims() != dims) {
    throw ValidationError(fmt::format("reference frame is {}x{}, expected {}x{}", reference.width,
                                      reference.height, dims.width, dims.height));
  }
  AlignmentReport report;
  if (dots.empty()) return report;
  const heatmap::FrameRGB ours = render_dots(dots, dims, radius);
  const int window = radius + search_radius_px;
  for (const auto& d : dots) {
    const Point2 c = to_pixels(d, dims);
    DotMatch m;
    // Centroid of our own dot, so clipping at the border cancels out.
    m.expected_px = centroid(ours, c.x, c.y, radius, 128.0).value_or(c);
    m.found_px = centroid(reference, c.x, c.y, window, 128.0);
    if (m.found_px) {
      m.offset_px = std::hypot(m.found_px->x - m.expected_px.x, m.found_px->y - m.expected_px.y);
      report.max_offset_px = std::max(report.max_offset_px, m.offset_px);
    } else {
      ++report.missing;
    }
    report.dots.push_back(m);
  }
  return report;
}

nlohmann::json to_json(const AlignmentReport& report) {
  nlohmann::json dots = nlohmann::json::array();
  for (const auto& d : report.dots) {
    nlohmann::json j = {{"expected", {{"x", d.expected_px.x}, {"y", d.expected_px.y}}}};
    if (d.found_px) {
      j["found"] = {{"x", d.found_px->x}, {"y", d.found_px->y}};
      j["offset_px"] = d.offset_px;
    } else {
      j["found"] = nullptr;
      j["offset_px"] = nullptr;
    }
    dots.push_back(std::move(j));
  }
  return {{"dots", std::move(dots)}, {"max_offset_px", report.max_offset_px}, {"missing", report.missing}};
}

}  // namespace itrace::service
