#include "itrace/heatmap/session_ops.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "itrace/errors.hpp"

namespace itrace::heatmap {

std::vector<GazePoint> merge_sessions(std::span<const GazeSession> sessions) {
  if (sessions.empty()) throw ValidationError("merge_sessions: no sessions given");
  const std::string& video = sessions.front().video.name;
  std::vector<std::string> offenders;
  std::size_t total = 0;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    total += sessions[i].points.size();
    if (sessions[i].video.name != video) {
      offenders.push_back(fmt::format("session {} (user '{}') names '{}'", i, sessions[i].user.id,
                                      sessions[i].video.name));
    }
  }
  if (!offenders.empty()) {
    throw ValidationError(fmt::format("sessions reference different videos (expected '{}'): {}", video,
                                      fmt::join(offenders, "; ")));
  }
  std::vector<GazePoint> merged;
  merged.reserve(total);
  for (const auto& s : sessions) merged.insert(merged.end(), s.points.begin(), s.points.end());
  std::stable_sort(merged.begin(), merged.end(),
                   [](const GazePoint& a, const GazePoint& b) { return a.t < b.t; });
  return merged;
}

SpatialRemap remap_spatial(std::span<const GazePoint> points, const RenderConfig& cfg,
                           Dims recorded_dims) {
  const int top = cfg.crop_top_px;
  const int bottom = cfg.crop_bottom_px;
  const double height = recorded_dims.height;
  if (top < 0 || bottom < 0 || top + bottom >= recorded_dims.height) {
    throw ValidationError(fmt::format("crop {}+{} px exceeds recorded height {}", top, bottom,
                                      recorded_dims.height));
  }
  const double visible = height - top - bottom;
  SpatialRemap out;
  for (const auto& p : points) {
    const double t = p.t - cfg.delay_offset_s;
    if (t < 0.0) {
      out.dropped.push_back({p, kDropBeforeRecording});
      continue;
    }
    const double y = (p.y * height - top) / visible;
    if (y < 0.0 || y > 1.0) {
      out.dropped.push_back({p, kDropOutsideCrop});
      continue;
    }
    out.kept.push_back({p.x, y, t});
  }
  return out;
}

}  // namespace itrace::heatmap
