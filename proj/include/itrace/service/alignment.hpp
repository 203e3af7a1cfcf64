#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "itrace/gaze_model.hpp"
#include "itrace/heatmap/frame.hpp"

namespace itrace::service {

inline constexpr int kAlignmentDotRadius = 4;

/// White filled dots of fixed radius on black, one per normalized coordinate.
heatmap::FrameRGB render_dots(const std::vector<Point2>& dots, heatmap::Dims dims,
                              int radius = kAlignmentDotRadius);

struct DotMatch {
  Point2 expected_px;
  std::optional<Point2> found_px;  // unset when nothing bright is near
  double offset_px = 0.0;
};

struct AlignmentReport {
  std::vector<DotMatch> dots;
  double max_offset_px = 0.0;
  int missing = 0;
};

/// For every dot, finds the brightness-weighted centroid in the reference
/// frame inside a search window around where the renderer put it, and
/// reports the distance between the two centroids.
AlignmentReport alignment_check(const std::vector<Point2>& dots, const heatmap::FrameRGB& reference,
                                heatmap::Dims dims, int radius = kAlignmentDotRadius,
                                int search_radius_px = 24);

nlohmann::json to_json(const AlignmentReport& report);

}  // namespace itrace::service
