#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace itrace {

/// Normalized 2-D position; both components are fractions of the frame.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

/// One click-anchored gaze sample. x, y in [0,1]; t in seconds since session start.
struct GazePoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  bool operator==(const GazePoint&) const = default;
};

enum class ClickMethod { pinch, dwell, controller, simulated };
enum class CaptureMode { video, spatial };

std::string_view to_string(ClickMethod method);
std::string_view to_string(CaptureMode mode);
std::optional<ClickMethod> parse_click_method(std::string_view text);
std::optional<CaptureMode> parse_capture_mode(std::string_view text);

struct UserInfo {
  std::string id;
  std::optional<double> precision_score;  // percent, [0,100]
  bool operator==(const UserInfo&) const = default;
};

struct VideoInfo {
  std::string name;
  std::optional<double> duration_s;
  bool operator==(const VideoInfo&) const = default;
};

inline constexpr int kSchemaVersion = 1;

/// A validated recording. Points are sorted by t (non-decreasing).
struct GazeSession {
  int schema_version = kSchemaVersion;
  UserInfo user;
  ClickMethod click_method = ClickMethod::simulated;
  CaptureMode mode = CaptureMode::video;
  VideoInfo video;
  std::vector<GazePoint> points;
  bool operator==(const GazeSession&) const = default;
};

/// Session content as parsed, before enum and range validation.
struct RawSession {
  int schema_version = kSchemaVersion;
  UserInfo user;
  std::string click_method;
  std::string mode;
  VideoInfo video;
  std::vector<GazePoint> points;
};

struct ValidationOptions {
  /// When set and the session declares a duration, every t must satisfy
  /// t <= duration + slack.
  std::optional<double> duration_slack_s;
};

/// Coordinates this close outside [0,1] are edge rounding and get clamped.
inline constexpr double kEdgeClampTolerance = 1e-6;

GazeSession validate_session(const RawSession& raw, const ValidationOptions& options = {});
RawSession to_raw(const GazeSession& session);

/// Maps a pixel click inside a viewport to normalized coordinates, clamped to [0,1].
Point2 normalize_click(double pixel_x, double pixel_y, double viewport_w, double viewport_h);

struct PrecisionAttempt {
  Point2 click;
  Point2 target_center;
  double target_radius = 0.0;  // same normalized units as the positions
};

}  // namespace itrace
