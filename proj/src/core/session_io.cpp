#include "itrace/session_io.hpp"

#include <fmt/format.h>

#include "itrace/canonical_json.hpp"
#include "itrace/errors.hpp"

namespace itrace {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(fmt::format("missing required field '{}{}'", where, key));
  return *it;
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ParseError(fmt::format("field '{}' must be a number", what));
  return v.get<double>();
}

std::string string_field(const json& v, const std::string& what) {
  if (!v.is_string()) throw ParseError(fmt::format("field '{}' must be a string", what));
  return v.get<std::string>();
}

std::optional<double> nullable_number(const json& obj, const char* key, const std::string& what) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return number(*it, what);
}

json maybe(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json point_json(const GazePoint& p) {
  return json{{"x", p.x}, {"y", p.y}, {"t", p.t}};
}

}  // namespace

RawSession parse_session(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("malformed session document at byte {}: {}", e.byte, e.what()));
  }
  if (!doc.is_object()) throw ParseError("session document must be a JSON object");

  RawSession raw;
  const json& version = require(doc, "schema_version", "");
  if (!version.is_number_integer()) throw ParseError("field 'schema_version' must be an integer");
  raw.schema_version = version.get<int>();
  if (raw.schema_version != kSchemaVersion) {
    throw VersionError(fmt::format("unsupported schema_version {}", raw.schema_version));
  }

  const json& user = require(doc, "user", "");
  if (!user.is_object()) throw ParseError("field 'user' must be an object");
  raw.user.id = string_field(require(user, "id", "user."), "user.id");
  raw.user.precision_score = nullable_number(user, "precision_score", "user.precision_score");

  raw.click_method = string_field(require(doc, "click_method", ""), "click_method");
  raw.mode = string_field(require(doc, "mode", ""), "mode");

  const json& video = require(doc, "video", "");
  if (!video.is_object()) throw ParseError("field 'video' must be an object");
  raw.video.name = string_field(require(video, "name", "video."), "video.name");
  raw.video.duration_s = nullable_number(video, "duration_s", "video.duration_s");

  const json& points = require(doc, "points", "");
  if (!points.is_array()) throw ParseError("field 'points' must be an array");
  raw.points.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const json& p = points[i];
    if (!p.is_object()) throw ParseError(fmt::format("points[{}] must be an object", i));
    auto field = [&](const char* k) {
      auto it = p.find(k);
      if (it == p.end()) throw ParseError(fmt::format("points[{}]: missing '{}'", i, k));
      return number(*it, fmt::format("points[{}].{}", i, k));
    };
    raw.points.push_back({field("x"), field("y"), field("t")});
  }
  return raw;
}

GazeSession read_session(std::string_view bytes, const ValidationOptions& options) {
  return validate_session(parse_session(bytes), options);
}

json session_to_json(const GazeSession& s) {
  json points = json::array();
  for (const auto& p : s.points) points.push_back(point_json(p));
  return json{
      {"schema_version", s.schema_version},
      {"user", {{"id", s.user.id}, {"precision_score", maybe(s.user.precision_score)}}},
      {"click_method", std::string(to_string(s.click_method))},
      {"mode", std::string(to_string(s.mode))},
      {"video", {{"name", s.video.name}, {"duration_s", maybe(s.video.duration_s)}}},
      {"points", std::move(points)},
  };
}

std::string write_session(const GazeSession& session) {
  return canonical_json(session_to_json(session));
}

std::string write_session_echo(const GazeSession& session, std::span<const DroppedPoint> dropped) {
  json doc = session_to_json(session);
  json list = json::array();
  for (const auto& d : dropped) {
    json entry = point_json(d.point);
    entry["reason"] = d.reason;
    list.push_back(std::move(entry));
  }
  doc["dropped"] = std::move(list);
  return canonical_json(doc);
}

}  // namespace itrace
