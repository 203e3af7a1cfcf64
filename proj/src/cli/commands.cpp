#include "itrace/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <csignal>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "itrace/canonical_json.hpp"
#include "itrace/errors.hpp"
#include "itrace/heatmap/session_ops.hpp"
#include "itrace/metrics.hpp"
#include "itrace/service/discovery.hpp"
#include "itrace/service/http_server.hpp"
#include "itrace/session_io.hpp"
#include "itrace/sim/click_methods.hpp"
#include "itrace/video/render_video.hpp"

namespace fs = std::filesystem;

namespace itrace::cli {

namespace {

/// Input problems the user can fix; reported with exit code 2.
struct UsageError : Error {
  using Error::Error;
};

std::atomic<bool> g_signalled{false};

extern "C" void on_signal(int) { g_signalled = true; }

std::string read_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw UsageError(fmt::format("no such file: {}", p.string()));
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(fmt::format("cannot write {}", p.string()));
}

GazeSession load_session(const fs::path& p) {
  const std::string bytes = read_file(p);
  try {
    return read_session(bytes);
  } catch (const Error& e) {
    throw UsageError(fmt::format("{}: {}", p.string(), e.what()));
  }
}

const std::vector<std::string> kRenderKeys = {"fps",          "working_width",  "fade_duration_s",
                                              "blur_sigma_px", "darken_factor", "hold_seconds",
                                              "delay_offset_s", "crop_top_px",  "crop_bottom_px"};

/// Registers --<key> for every key; values land in `values` only when given.
void add_setting_flags(CLI::App* cmd, const std::vector<std::string>& keys,
                       std::map<std::string, std::string>& values) {
  for (const auto& key : keys) {
    std::string names = "--" + key;
    if (key == "fade_duration_s") names += ",--fade";
    cmd->add_option_function<std::string>(
        names, [&values, key](const std::string& v) { values[key] = v; }, fmt::format("override {}", key));
  }
}

heatmap::RenderConfig render_config(const std::map<std::string, std::string>& values) {
  service::ServiceConfig cfg;
  try {
    for (const auto& [k, v] : values) service::apply_setting(cfg, k, v);
    cfg.render.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  return cfg.render;
}

bool is_video_file(const fs::path& p) {
  static const std::set<std::string> exts = {".mp4", ".m4v", ".mov", ".avi", ".mkv", ".webm"};
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return fs::is_regular_file(p) && exts.count(ext) != 0;
}

bool is_frame_folder(const fs::path& p) { return fs::is_directory(p) && fs::exists(p / "meta.txt"); }

bool is_session_file(const fs::path& p) {
  const std::string name = p.filename().string();
  const auto ends_with = [&](std::string_view suffix) {
    return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return fs::is_regular_file(p) && ends_with(".json") && !ends_with(".sim.json");
}

std::vector<fs::path> sorted_entries(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError(fmt::format("no such folder: {}", dir.string()));
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json debug_dump(const heatmap::RenderStats& stats, const heatmap::ScalarFrame& raw) {
  nlohmann::json cells = nlohmann::json::array();
  double max = 0.0;
  for (int y = 0; y < raw.height; ++y) {
    for (int x = 0; x < raw.width; ++x) {
      const double v = raw.at(x, y);
      if (v == 0.0) continue;
      max = std::max(max, v);
      cells.push_back({{"x", x}, {"y", y}, {"v", v}});
    }
  }
  return {{"width", stats.dims.width},
          {"height", stats.dims.height},
          {"fps", stats.fps},
          {"heat_frames", stats.heat_frames},
          {"hold_frames", stats.hold_frames},
          {"global_max", stats.global_max},
          {"cumulative_raw", {{"max", max}, {"cells", std::move(cells)}}}};
}

struct RenderFlags {
  fs::path out_dir = service::default_output_dir();
  bool frames = false;
  bool json = false;
  std::optional<fs::path> debug_dump;
  std::map<std::string, std::string> settings;
};

void add_output_flags(CLI::App* cmd, RenderFlags& f) {
  cmd->add_option("--out", f.out_dir, "output folder (default ~/Desktop/Heatmap)");
  cmd->add_flag("--frames", f.frames, "write a lossless frame folder instead of a video file");
  cmd->add_flag("--json", f.json, "machine-readable output");
  cmd->add_option("--debug-dump", f.debug_dump, "write pipeline internals as JSON");
  add_setting_flags(cmd, kRenderKeys, f.settings);
}

void report_render(const video::RenderOutputs& r, const RenderFlags& f, const heatmap::ScalarFrame& raw,
                   std::ostream& out) {
  if (f.debug_dump) write_file(*f.debug_dump, canonical_json(debug_dump(r.stats, raw)));
  if (f.json) {
    out << nlohmann::json{{"heatmap", r.heatmap.string()},
                          {"echo", r.echo.string()},
                          {"frames", r.stats.heat_frames + r.stats.hold_frames},
                          {"heat_frames", r.stats.heat_frames},
                          {"hold_frames", r.stats.hold_frames},
                          {"points", r.rendered_points},
                          {"dropped", r.dropped_points}}
               .dump()
        << "\n";
  } else {
    out << r.heatmap.string() << "\n" << r.echo.string() << "\n";
  }
}

int cmd_render(const fs::path& video_path, const fs::path& gaze_path, const RenderFlags& f, std::ostream& out) {
  if (!fs::exists(video_path)) throw UsageError(fmt::format("no such file: {}", video_path.string()));
  const GazeSession session = load_session(gaze_path);
  const auto cfg = render_config(f.settings);
  heatmap::ScalarFrame raw;
  heatmap::RenderObserver obs;
  obs.on_cumulative_raw = [&](const heatmap::ScalarFrame& r) { raw = r; };
  const auto r = video::render_heatmap_video(video_path, session, cfg, f.out_dir,
                                             f.frames ? video::OutputFormat::frames : video::OutputFormat::video,
                                             obs);
  report_render(r, f, raw, out);
  return kExitOk;
}

int cmd_average(const fs::path& folder, const RenderFlags& f, std::ostream& out) {
  std::vector<fs::path> videos;
  std::vector<fs::path> session_files;
  for (const auto& p : sorted_entries(folder)) {
    if (is_video_file(p) || is_frame_folder(p)) videos.push_back(p);
    if (is_session_file(p)) session_files.push_back(p);
  }
  if (videos.size() != 1) {
    throw UsageError(fmt::format("{} must contain exactly one video, found {}", folder.string(), videos.size()));
  }
  if (session_files.empty()) throw UsageError(fmt::format("{} contains no session files", folder.string()));
  std::vector<GazeSession> sessions;
  for (const auto& p : session_files) sessions.push_back(load_session(p));
  try {
    heatmap::merge_sessions(sessions);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  const auto cfg = render_config(f.settings);
  heatmap::ScalarFrame raw;
  heatmap::RenderObserver obs;
  obs.on_cumulative_raw = [&](const heatmap::ScalarFrame& r) { raw = r; };
  const auto r = video::render_average_video(videos.front(), sessions, cfg, f.out_dir,
                                             f.frames ? video::OutputFormat::frames : video::OutputFormat::video,
                                             obs);
  report_render(r, f, raw, out);
  return kExitOk;
}

struct SimulateFlags {
  std::string method = "turbo";
  double duration = 60.0;
  std::uint64_t seed = 1;
  std::optional<fs::path> out;
  std::string user_id;
  std::string video_name = "synthetic.mp4";
  std::string scanpath = "video";
  std::optional<double> rate, jitter, duty, hold_cycle, dwell_time, tolerance, refractory, pinch_rate,
      halflife, mu, sigma, drift, stickiness;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  sim::SimulationRequest req;
  const auto method = sim::parse_sim_method(f.method);
  if (!method) throw UsageError(fmt::format("unknown method '{}' (turbo, dwell, pinch)", f.method));
  req.model.method = *method;
  if (f.scanpath == "video") {
    req.scanpath = sim::ScanpathModel::video_viewing(f.seed);
  } else if (f.scanpath == "uniform") {
    req.scanpath.seed = f.seed;
  } else {
    throw UsageError(fmt::format("unknown scanpath '{}' (video, uniform)", f.scanpath));
  }
  auto set = [](const std::optional<double>& v, double& field) {
    if (v) field = *v;
  };
  set(f.rate, req.model.turbo.rate_hz);
  set(f.jitter, req.model.turbo.rate_jitter_fraction);
  set(f.duty, req.model.turbo.hold_duty_cycle);
  set(f.hold_cycle, req.model.turbo.hold_cycle_s);
  set(f.dwell_time, req.model.dwell.dwell_time_s);
  set(f.tolerance, req.model.dwell.movement_tolerance);
  set(f.refractory, req.model.dwell.refractory_s);
  set(f.pinch_rate, req.model.pinch.base_rate_hz);
  set(f.halflife, req.model.pinch.fatigue_halflife_s);
  set(f.mu, req.scanpath.fixation_mu);
  set(f.sigma, req.scanpath.fixation_sigma);
  set(f.drift, req.scanpath.drift_per_s);
  set(f.stickiness, req.scanpath.region_stickiness);
  req.duration_s = f.duration;
  req.user_id = f.user_id.empty() ? fmt::format("sim-{}-{}", f.method, f.seed) : f.user_id;
  req.video_name = f.video_name;
  if (!(req.duration_s > 0.0)) throw UsageError("--duration must be > 0");

  GazeSession session;
  try {
    req.model.validate();
    session = sim::simulate_session(req);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  const fs::path path = f.out.value_or(fs::path(fmt::format("sim_{}_{}.json", f.method, f.seed)));
  write_file(path, write_session(session));
  write_file(path.string() + ".sim.json", canonical_json(sim::to_json(req)));
  out << path.string() << "\n";
  return kExitOk;
}

std::string method_label(const GazeSession& s, const fs::path& file) {
  if (s.click_method != ClickMethod::simulated) return std::string(to_string(s.click_method));
  const fs::path sidecar = file.string() + ".sim.json";
  if (!fs::exists(sidecar)) return std::string(to_string(s.click_method));
  try {
    const auto req = sim::simulation_from_json(nlohmann::json::parse(read_file(sidecar)));
    return std::string(sim::group_label(req.model.method));
  } catch (const std::exception&) {
    return std::string(to_string(s.click_method));
  }
}

int cmd_analyze(const fs::path& folder, bool json, std::ostream& out) {
  std::vector<metrics::SessionClickRecord> records;
  nlohmann::json per_session = nlohmann::json::array();
  std::vector<std::string> lines;
  for (const auto& p : sorted_entries(folder)) {
    if (!is_session_file(p)) continue;
    const GazeSession s = load_session(p);
    const auto ts = metrics::timestamps_of(s);
    const double end = s.video.duration_s.value_or(ts.empty() ? 0.0 : ts.back());
    const auto stats = metrics::click_stats(ts, 0.0, end);
    const std::string method = method_label(s, p);
    records.push_back({method, s.video.name, stats.total_clicks});
    per_session.push_back({{"file", p.filename().string()},
                           {"user_id", s.user.id},
                           {"method", method},
                           {"video", s.video.name},
                           {"stats", metrics::to_json(stats)}});
    lines.push_back(fmt::format("{}  {}  {}  {}  clicks={} cps={}", p.filename().string(), s.user.id, method,
                                s.video.name, stats.total_clicks,
                                stats.mean_cps ? fmt::format("{:.3f}", *stats.mean_cps) : std::string("-")));
  }
  if (records.empty()) throw UsageError(fmt::format("{} contains no session files", folder.string()));
  const auto summary = metrics::group_summary(records);
  if (json) {
    out << canonical_json({{"summary", metrics::to_json(summary)}, {"sessions", per_session}});
  } else {
    out << metrics::to_text(summary) << "\n";
    for (const auto& l : lines) out << l << "\n";
  }
  return kExitOk;
}

int cmd_serve(const std::optional<fs::path>& config_file, const std::map<std::string, std::string>& settings,
              std::ostream& out, const std::atomic<bool>* stop) {
  service::ServiceConfig cfg;
  try {
    cfg = service::load_config(config_file, service::process_env(), settings);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  service::SessionService svc(cfg, service::make_recorder(cfg, service::steady_clock_seconds()));
  service::HttpServer http(svc, cfg.host, cfg.port);
  const int port = http.start();
  out << "listening on " << cfg.host << ":" << port << std::endl;

  std::unique_ptr<service::UdpMulticastTransport> mdns;
  std::unique_ptr<service::ServiceAdvertiser> advertiser;
  if (cfg.discovery) {
    try {
      mdns = std::make_unique<service::UdpMulticastTransport>();
      advertiser = std::make_unique<service::ServiceAdvertiser>(
          *mdns, service::local_service_info(cfg.instance_name, static_cast<std::uint16_t>(port)));
      advertiser->start();
      out << "announced " << advertiser->full_name() << std::endl;
    } catch (const std::exception& e) {
      spdlog::warn("service discovery unavailable: {}", e.what());
      advertiser.reset();
      mdns.reset();
    }
  }

  g_signalled = false;
  auto prev_int = std::signal(SIGINT, on_signal);
  auto prev_term = std::signal(SIGTERM, on_signal);
  while (!g_signalled && !(stop && stop->load())) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  std::signal(SIGINT, prev_int);
  std::signal(SIGTERM, prev_term);

  if (advertiser) advertiser->stop();
  http.stop();
  out << "stopped" << std::endl;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* stop) {
  CLI::App app("Gaze heatmap toolkit", "itrace");
  app.require_subcommand(1);

  RenderFlags render_flags;
  fs::path video_path;
  fs::path gaze_path;
  auto* render = app.add_subcommand("render", "render one session over its video");
  render->add_option("video", video_path, "video file or frame folder")->required();
  render->add_option("gaze", gaze_path, "session file")->required();
  add_output_flags(render, render_flags);

  RenderFlags avg_flags;
  fs::path avg_folder;
  auto* average = app.add_subcommand("average", "merged heatmap of every session in a folder");
  average->add_option("folder", avg_folder, "folder with one video and its session files")->required();
  add_output_flags(average, avg_flags);

  SimulateFlags sf;
  auto* simulate = app.add_subcommand("simulate", "write a synthetic session");
  simulate->add_option("--method", sf.method, "turbo, dwell or pinch")->capture_default_str();
  simulate->add_option("--duration", sf.duration, "seconds")->capture_default_str();
  simulate->add_option("--seed", sf.seed)->capture_default_str();
  simulate->add_option("--out", sf.out, "session file to write");
  simulate->add_option("--user-id", sf.user_id);
  simulate->add_option("--video-name", sf.video_name)->capture_default_str();
  simulate->add_option("--scanpath", sf.scanpath, "video or uniform")->capture_default_str();
  simulate->add_option("--rate", sf.rate, "turbo clicks per second");
  simulate->add_option("--jitter", sf.jitter, "turbo interval jitter fraction");
  simulate->add_option("--duty", sf.duty, "turbo hold duty cycle");
  simulate->add_option("--hold-cycle", sf.hold_cycle, "turbo hold+release cycle, seconds");
  simulate->add_option("--dwell-time", sf.dwell_time, "seconds");
  simulate->add_option("--tolerance", sf.tolerance, "dwell radius, normalized");
  simulate->add_option("--refractory", sf.refractory, "seconds");
  simulate->add_option("--pinch-rate", sf.pinch_rate, "clicks per second at t=0");
  simulate->add_option("--halflife", sf.halflife, "pinch fatigue half-life, seconds");
  simulate->add_option("--mu", sf.mu, "log-mean fixation duration");
  simulate->add_option("--sigma", sf.sigma, "log-sd fixation duration");
  simulate->add_option("--drift", sf.drift, "fixation drift, normalized units per second");
  simulate->add_option("--stickiness", sf.stickiness, "probability of staying in a region");

  fs::path analyze_folder;
  bool analyze_json = false;
  auto* analyze = app.add_subcommand("analyze", "click statistics over a folder of sessions");
  analyze->add_option("folder", analyze_folder)->required();
  analyze->add_flag("--json", analyze_json);

  std::optional<fs::path> config_file;
  std::map<std::string, std::string> serve_settings;
  auto* serve = app.add_subcommand("serve", "run the session service");
  serve->add_option("--config", config_file, "JSON config file");
  std::vector<std::string> serve_keys;
  for (const auto& k : service::config_keys()) {
    if (k != "output_dir") serve_keys.push_back(k);
  }
  add_setting_flags(serve, serve_keys, serve_settings);
  serve->add_option_function<std::string>(
      "--out,--output_dir", [&](const std::string& v) { serve_settings["output_dir"] = v; }, "output folder");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*render) return cmd_render(video_path, gaze_path, render_flags, out);
    if (*average) return cmd_average(avg_folder, avg_flags, out);
    if (*simulate) return cmd_simulate(sf, out);
    if (*analyze) return cmd_analyze(analyze_folder, analyze_json, out);
    if (*serve) return cmd_serve(config_file, serve_settings, out, stop);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace itrace::cli
