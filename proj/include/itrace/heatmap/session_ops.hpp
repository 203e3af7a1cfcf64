#pragma once

#include <span>
#include <vector>

#include "itrace/gaze_model.hpp"
#include "itrace/heatmap/config.hpp"
#include "itrace/heatmap/frame.hpp"
#include "itrace/session_io.hpp"

namespace itrace::heatmap {

/// Multiset union of all sessions' points, re-sorted by t. All sessions must
/// name the same video.
std::vector<GazePoint> merge_sessions(std::span<const GazeSession> sessions);

struct SpatialRemap {
  std::vector<GazePoint> kept;
  std::vector<DroppedPoint> dropped;
};

inline constexpr const char* kDropBeforeRecording = "before_recording_start";
inline constexpr const char* kDropOutsideCrop = "outside_crop";

/// Shifts timestamps by the recorder start delay and maps y into the cropped
/// footage. Points that land before t = 0 or outside the crop are dropped.
SpatialRemap remap_spatial(std::span<const GazePoint> points, const RenderConfig& cfg,
                           Dims recorded_dims);

}  // namespace itrace::heatmap
