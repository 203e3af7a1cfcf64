#include "itrace/video/render_video.hpp"

#include <fstream>

#include <fmt/format.h>

#include "itrace/errors.hpp"
#include "itrace/heatmap/session_ops.hpp"
#include "itrace/session_io.hpp"
#include "itrace/video/frame_folder.hpp"
#include "itrace/video/video_file.hpp"

namespace fs = std::filesystem;

namespace itrace::video {

std::string sanitize_id(std::string_view id) {
  std::string out;
  out.reserve(id.size());
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "anonymous";
  return out;
}

namespace {

std::string source_stem(const fs::path& source) {
  fs::path p = source;
  if (p.filename().empty()) p = p.parent_path();
  return fs::is_directory(p) ? p.filename().string() : p.stem().string();
}

std::unique_ptr<heatmap::FrameSink> make_sink(const fs::path& target, OutputFormat format) {
  if (format == OutputFormat::frames) return std::make_unique<FrameFolderSink>(target);
  return std::make_unique<VideoFileSink>(target);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw RenderError("write", fmt::format("cannot write {}", path.string()));
}

RenderOutputs render_points(const fs::path& source_path, const GazeSession& echo_base,
                            std::span<const GazePoint> points, bool spatial,
                            const heatmap::RenderConfig& cfg, const fs::path& out_dir,
                            const std::string& name, OutputFormat format,
                            const heatmap::RenderObserver& observer) {
  cfg.validate();
  auto source = open_source(source_path);

  std::vector<GazePoint> kept(points.begin(), points.end());
  std::vector<DroppedPoint> dropped;
  heatmap::FrameSource* input = source.get();
  std::unique_ptr<heatmap::CroppedSource> cropped;
  if (spatial) {
    auto remap = heatmap::remap_spatial(points, cfg, source->dims());
    kept = std::move(remap.kept);
    dropped = std::move(remap.dropped);
    if (cfg.crop_top_px > 0 || cfg.crop_bottom_px > 0) {
      cropped = std::make_unique<heatmap::CroppedSource>(*source, cfg.crop_top_px, cfg.crop_bottom_px);
      input = cropped.get();
    }
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw RenderError("write", fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));

  RenderOutputs out;
  out.heatmap = out_dir / (format == OutputFormat::frames ? name + "_heatmap" : name + "_heatmap.mp4");
  out.echo = out_dir / (name + "_gaze.json");
  auto sink = make_sink(out.heatmap, format);
  heatmap::HeatmapRenderer renderer(cfg);
  out.stats = renderer.render(*input, kept, *sink, observer);

  GazeSession echo = echo_base;
  echo.points = kept;
  write_text(out.echo, write_session_echo(echo, dropped));
  out.rendered_points = kept.size();
  out.dropped_points = dropped.size();
  return out;
}

}  // namespace

RenderOutputs render_heatmap_video(const fs::path& source, const GazeSession& session,
                                   const heatmap::RenderConfig& cfg, const fs::path& out_dir,
                                   OutputFormat format, const heatmap::RenderObserver& observer) {
  const std::string name = fmt::format("{}_{}", source_stem(source), sanitize_id(session.user.id));
  return render_points(source, session, session.points, session.mode == CaptureMode::spatial, cfg,
                       out_dir, name, format, observer);
}

RenderOutputs render_average_video(const fs::path& source, std::span<const GazeSession> sessions,
                                   const heatmap::RenderConfig& cfg, const fs::path& out_dir,
                                   OutputFormat format, const heatmap::RenderObserver& observer) {
  const auto merged = heatmap::merge_sessions(sessions);
  GazeSession base = sessions.front();
  base.user = {"avg", std::nullopt};
  return render_points(source, base, merged, false, cfg, out_dir,
                       fmt::format("{}_avg", source_stem(source)), format, observer);
}

}  // namespace itrace::video
