#include "itrace/service/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "itrace/errors.hpp"

namespace fs = std::filesystem;

namespace itrace::service {

namespace {

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("{}: expected a number, got '{}'", key, v));
  }
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ValidationError(fmt::format("{}: expected an integer, got '{}'", key, v));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ValidationError(fmt::format("{}: expected true/false, got '{}'", key, v));
}

using Setter = std::function<void(ServiceConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"host", [](auto& c, auto&, auto& v) { c.host = v; }},
      {"port", [](auto& c, auto& k, auto& v) { c.port = parse_int(k, v); }},
      {"output_dir", [](auto& c, auto&, auto& v) { c.output_dir = v; }},
      {"workers", [](auto& c, auto& k, auto& v) { c.workers = parse_int(k, v); }},
      {"recorder",
       [](auto& c, auto& k, auto& v) {
         if (v == "mock" || v == "mock_synthetic") {
           c.recorder = RecorderBackend::mock_synthetic;
         } else if (v == "external" || v == "external_command") {
           c.recorder = RecorderBackend::external_command;
         } else {
           throw ValidationError(fmt::format("{}: unknown backend '{}'", k, v));
         }
       }},
      {"recorder_command", [](auto& c, auto&, auto& v) { c.recorder_command = v; }},
      {"wait_timeout_s", [](auto& c, auto& k, auto& v) { c.wait_timeout_s = parse_double(k, v); }},
      {"instance_name", [](auto& c, auto&, auto& v) { c.instance_name = v; }},
      {"discovery", [](auto& c, auto& k, auto& v) { c.discovery = parse_bool(k, v); }},
      {"fps", [](auto& c, auto& k, auto& v) { c.render.fps = parse_double(k, v); }},
      {"working_width", [](auto& c, auto& k, auto& v) { c.render.working_width = parse_int(k, v); }},
      {"fade_duration_s", [](auto& c, auto& k, auto& v) { c.render.fade_duration_s = parse_double(k, v); }},
      {"blur_sigma_px", [](auto& c, auto& k, auto& v) { c.render.blur_sigma_px = parse_double(k, v); }},
      {"darken_factor", [](auto& c, auto& k, auto& v) { c.render.darken_factor = parse_double(k, v); }},
      {"hold_seconds", [](auto& c, auto& k, auto& v) { c.render.hold_seconds = parse_double(k, v); }},
      {"delay_offset_s", [](auto& c, auto& k, auto& v) { c.render.delay_offset_s = parse_double(k, v); }},
      {"crop_top_px", [](auto& c, auto& k, auto& v) { c.render.crop_top_px = parse_int(k, v); }},
      {"crop_bottom_px", [](auto& c, auto& k, auto& v) { c.render.crop_bottom_px = parse_int(k, v); }},
  };
  return table;
}

std::string env_name(const std::string& key) {
  std::string out = "ITRACE_";
  for (char c : key) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

}  // namespace

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw ValidationError("port must be in [0, 65535]");
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (!(wait_timeout_s >= 0.0)) throw ValidationError("wait_timeout_s must be >= 0");
  if (recorder == RecorderBackend::external_command && recorder_command.empty()) {
    throw ValidationError("external recorder needs recorder_command");
  }
  render.validate();
}

fs::path default_output_dir() {
  const char* home = std::getenv("HOME");
  if (home == nullptr || *home == '\0') return fs::path("Heatmap");
  return fs::path(home) / "Desktop" / "Heatmap";
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void apply_setting(ServiceConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ValidationError(fmt::format("unknown config key '{}'", key));
  it->second(cfg, key, value);
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

ServiceConfig load_config(const std::optional<fs::path>& file, const EnvLookup& env,
                          const std::map<std::string, std::string>& flags) {
  ServiceConfig cfg;
  cfg.output_dir = default_output_dir();
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ValidationError(fmt::format("cannot read config file {}", file->string()));
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(fmt::format("config file {}: malformed JSON at byte {}", file->string(), e.byte));
    }
    if (!doc.is_object()) throw ParseError("config file must hold a JSON object");
    for (const auto& [key, value] : doc.items()) {
      apply_setting(cfg, key, value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  if (env) {
    for (const auto& key : config_keys()) {
      if (auto v = env(env_name(key))) apply_setting(cfg, key, *v);
    }
  }
  for (const auto& [key, value] : flags) apply_setting(cfg, key, value);
  cfg.validate();
  return cfg;
}

}  // namespace itrace::service
