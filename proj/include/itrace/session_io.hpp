#pragma once

#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "itrace/gaze_model.hpp"

namespace itrace {

/// A point removed before rendering, with a machine-readable reason.
struct DroppedPoint {
  GazePoint point;
  std::string reason;
};

/// Parses the session file format. Throws ParseError or VersionError.
RawSession parse_session(std::string_view bytes);

/// parse_session followed by validate_session.
GazeSession read_session(std::string_view bytes, const ValidationOptions& options = {});

nlohmann::json session_to_json(const GazeSession& session);
std::string write_session(const GazeSession& session);

/// The echo written next to a rendered video: the session as rendered plus
/// the list of points the renderer discarded.
std::string write_session_echo(const GazeSession& session, std::span<const DroppedPoint> dropped);

}  // namespace itrace
