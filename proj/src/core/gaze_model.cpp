#include "itrace/gaze_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "itrace/errors.hpp"

namespace itrace {

std::string_view to_string(ClickMethod method) {
  switch (method) {
    case ClickMethod::pinch: return "pinch";
    case ClickMethod::dwell: return "dwell";
    case ClickMethod::controller: return "controller";
    case ClickMethod::simulated: return "simulated";
  }
  return "simulated";
}

std::string_view to_string(CaptureMode mode) {
  return mode == CaptureMode::spatial ? "spatial" : "video";
}

std::optional<ClickMethod> parse_click_method(std::string_view text) {
  for (auto m : {ClickMethod::pinch, ClickMethod::dwell, ClickMethod::controller,
                 ClickMethod::simulated}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

std::optional<CaptureMode> parse_capture_mode(std::string_view text) {
  if (text == "video") return CaptureMode::video;
  if (text == "spatial") return CaptureMode::spatial;
  return std::nullopt;
}

namespace {

double checked_unit(double v, std::size_t index, char axis) {
  if (!std::isfinite(v) || v < -kEdgeClampTolerance || v > 1.0 + kEdgeClampTolerance) {
    throw ValidationError(fmt::format("point {}: {} out of range", index, axis));
  }
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

GazeSession validate_session(const RawSession& raw, const ValidationOptions& options) {
  if (raw.schema_version != kSchemaVersion) {
    throw VersionError(fmt::format("unsupported schema_version {}", raw.schema_version));
  }
  GazeSession s;
  s.schema_version = raw.schema_version;
  s.user = raw.user;
  s.video = raw.video;

  auto method = parse_click_method(raw.click_method);
  if (!method) throw ValidationError(fmt::format("unknown click_method '{}'", raw.click_method));
  s.click_method = *method;
  auto mode = parse_capture_mode(raw.mode);
  if (!mode) throw ValidationError(fmt::format("unknown mode '{}'", raw.mode));
  s.mode = *mode;

  if (s.user.precision_score) {
    double p = *s.user.precision_score;
    if (!std::isfinite(p) || p < 0.0 || p > 100.0) {
      throw ValidationError("user.precision_score out of range");
    }
  }
  if (s.video.duration_s) {
    double d = *s.video.duration_s;
    if (!std::isfinite(d) || d < 0.0) throw ValidationError("video.duration_s must be >= 0");
  }

  s.points.reserve(raw.points.size());
  for (std::size_t i = 0; i < raw.points.size(); ++i) {
    const auto& p = raw.points[i];
    GazePoint q{checked_unit(p.x, i, 'x'), checked_unit(p.y, i, 'y'), p.t};
    if (!std::isfinite(q.t) || q.t < 0.0) {
      throw ValidationError(fmt::format("point {}: t must be finite and >= 0", i));
    }
    if (options.duration_slack_s && s.video.duration_s &&
        q.t > *s.video.duration_s + *options.duration_slack_s) {
      throw ValidationError(fmt::format("point {}: t beyond video duration", i));
    }
    s.points.push_back(q);
  }
  std::stable_sort(s.points.begin(), s.points.end(),
                   [](const GazePoint& a, const GazePoint& b) { return a.t < b.t; });
  return s;
}

RawSession to_raw(const GazeSession& session) {
  RawSession raw;
  raw.schema_version = session.schema_version;
  raw.user = session.user;
  raw.click_method = std::string(to_string(session.click_method));
  raw.mode = std::string(to_string(session.mode));
  raw.video = session.video;
  raw.points = session.points;
  return raw;
}

Point2 normalize_click(double pixel_x, double pixel_y, double viewport_w, double viewport_h) {
  if (!(viewport_w > 0.0) || !(viewport_h > 0.0)) {
    throw ValidationError("viewport dimensions must be positive");
  }
  return {std::clamp(pixel_x / viewport_w, 0.0, 1.0), std::clamp(pixel_y / viewport_h, 0.0, 1.0)};
}

}  // namespace itrace
