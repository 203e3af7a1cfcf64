#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "itrace/gaze_model.hpp"
#include "itrace/heatmap/renderer.hpp"

namespace itrace::video {

enum class OutputFormat { video, frames };

struct RenderOutputs {
  std::filesystem::path heatmap;  // video file, or frame folder
  std::filesystem::path echo;
  heatmap::RenderStats stats;
  std::size_t rendered_points = 0;
  std::size_t dropped_points = 0;
};

/// Keeps [A-Za-z0-9._-], replaces everything else with '_'.
std::string sanitize_id(std::string_view id);

/// Decodes `source`, renders the session over it and writes
/// `<stem>_<user>_heatmap.mp4` (or a frame folder without extension) plus
/// `<stem>_<user>_gaze.json` into `out_dir`. Spatial sessions are remapped
/// and the footage cropped per the config first.
RenderOutputs render_heatmap_video(const std::filesystem::path& source, const GazeSession& session,
                                   const heatmap::RenderConfig& cfg,
                                   const std::filesystem::path& out_dir,
                                   OutputFormat format = OutputFormat::video,
                                   const heatmap::RenderObserver& observer = {});

/// Merged rendering of several users' sessions over one video, written as
/// `<stem>_avg_heatmap.<ext>` and `<stem>_avg_gaze.json`.
RenderOutputs render_average_video(const std::filesystem::path& source,
                                   std::span<const GazeSession> sessions,
                                   const heatmap::RenderConfig& cfg,
                                   const std::filesystem::path& out_dir,
                                   OutputFormat format = OutputFormat::video,
                                   const heatmap::RenderObserver& observer = {});

}  // namespace itrace::video
