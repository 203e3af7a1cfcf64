#include "itrace/heatmap/renderer.hpp"

#include <algorithm>
#include <cmath>

#include "itrace/errors.hpp"
#include "itrace/heatmap/colormap.hpp"
#include "itrace/heatmap/composite.hpp"

namespace itrace::heatmap {

HeatStrength::HeatStrength(const RenderConfig& cfg, Dims dims)
    : dims_(dims), blur_(cfg.blur_sigma_for(dims.width), dims), rescale_(cfg.rescale_blur_peak) {}

ScalarFrame HeatStrength::from_sparse(const SparseFrame& cells, double max_value) const {
  ScalarFrame normalized(dims_.width, dims_.height);
  if (max_value > 0.0) {
    for (const auto& [cell, v] : cells) normalized.values[cell] = std::sqrt(v / max_value);
  }
  return finish(std::move(normalized));
}

ScalarFrame HeatStrength::from_dense(const ScalarFrame& brightness, double max_value) const {
  ScalarFrame normalized = brightness;
  if (max_value > 0.0) {
    sqrt_normalize(normalized, max_value);
  } else {
    std::fill(normalized.values.begin(), normalized.values.end(), 0.0);
  }
  return finish(std::move(normalized));
}

ScalarFrame HeatStrength::finish(ScalarFrame normalized) const {
  ScalarFrame out = blur_.apply(normalized);
  const double gain = rescale_ ? blur_.center_gain() : 1.0;
  for (double& v : out.values) v = std::clamp(v / gain, 0.0, 1.0);
  return out;
}

FrameRGB cumulative_frame(std::span<const GazePoint> points, const RenderConfig& cfg,
                          const FrameRGB& final_background, ScalarFrame* raw_out) {
  const Dims dims = final_background.dims();
  ScalarFrame raw = accumulate_all(points, dims);
  const double max_value = raw.values.empty() ? 0.0 : *std::max_element(raw.values.begin(), raw.values.end());
  const ScalarFrame strength = HeatStrength(cfg, dims).from_dense(raw, max_value);
  if (raw_out) *raw_out = std::move(raw);
  return composite(apply_colormap(strength), strength, final_background, cfg.darken_factor);
}

HeatmapRenderer::HeatmapRenderer(RenderConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

RenderStats HeatmapRenderer::render(FrameSource& source, std::span<const GazePoint> points,
                                    FrameSink& sink, const RenderObserver& observer) {
  const int source_frames = source.frame_count();
  const double source_fps = source.fps();
  if (source_frames <= 0 || !(source_fps > 0.0)) {
    throw RenderError("decode", "source video has no frames");
  }

  RenderStats stats;
  stats.dims = working_dims(source.dims(), cfg_.working_width);
  stats.fps = cfg_.fps;
  stats.heat_frames = frame_count_for(source_frames / source_fps, cfg_.fps);
  stats.hold_frames = hold_frame_count(cfg_);

  const FrameAccumulator accumulator(points, cfg_.fps, cfg_.fade_duration_s, stats.dims);
  stats.global_max = accumulator.max_over(stats.heat_frames);
  const HeatStrength strength(cfg_, stats.dims);
  const double total = static_cast<double>(stats.heat_frames + stats.hold_frames);
  double written = 0.0;

  auto emit = [&](const FrameRGB& frame) {
    try {
      sink.write(frame);
    } catch (const RenderError&) {
      throw;
    } catch (const std::exception& e) {
      throw RenderError("encode", e.what());
    }
    written += 1.0;
    if (observer.on_progress) observer.on_progress(written / total);
  };

  try {
    sink.open(stats.dims, cfg_.fps);
  } catch (const RenderError&) {
    throw;
  } catch (const std::exception& e) {
    throw RenderError("encode", e.what());
  }

  int decoded = -1;
  int resized = -1;
  FrameRGB current;
  FrameRGB background;
  for (int f = 0; f < stats.heat_frames; ++f) {
    const int wanted = std::min(
        source_frames - 1, static_cast<int>(std::floor(f * source_fps / cfg_.fps + 1e-9)));
    while (decoded < wanted) {
      auto next = source.next();
      if (!next) break;  // stream shorter than advertised: hold the last frame
      ++decoded;
      current = std::move(*next);
    }
    if (decoded < 0) throw RenderError("decode", "no frames could be decoded");
    if (resized != decoded) {
      background = resize_area(current, stats.dims);
      resized = decoded;
    }

    const ScalarFrame s = strength.from_sparse(accumulator.sparse_frame(f), stats.global_max);
    if (observer.on_heat_strength) observer.on_heat_strength(f, s);
    emit(composite(apply_colormap(s), s, background, cfg_.darken_factor));
  }

  if (stats.heat_frames == 0) {
    auto first = source.next();
    if (!first) throw RenderError("decode", "no frames could be decoded");
    background = resize_area(*first, stats.dims);
  }
  ScalarFrame raw;
  const FrameRGB summary = cumulative_frame(points, cfg_, background, &raw);
  if (observer.on_cumulative_raw) observer.on_cumulative_raw(raw);
  for (int i = 0; i < stats.hold_frames; ++i) emit(summary);

  try {
    sink.close();
  } catch (const RenderError&) {
    throw;
  } catch (const std::exception& e) {
    throw RenderError("encode", e.what());
  }
  return stats;
}

}  // namespace itrace::heatmap
