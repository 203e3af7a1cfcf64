#include "itrace/sim/click_methods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "itrace/errors.hpp"

namespace itrace::sim {

std::string_view to_string(SimMethod m) {
  switch (m) {
    case SimMethod::turbo: return "turbo";
    case SimMethod::dwell: return "dwell";
    case SimMethod::pinch: return "pinch";
  }
  return "turbo";
}

std::optional<SimMethod> parse_sim_method(std::string_view text) {
  for (auto m : {SimMethod::turbo, SimMethod::dwell, SimMethod::pinch}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

std::string_view group_label(SimMethod m) {
  switch (m) {
    case SimMethod::turbo: return "controller";
    case SimMethod::dwell: return "dwell";
    case SimMethod::pinch: return "pinch";
  }
  return "controller";
}

void ClickMethodModel::validate() const {
  if (!(turbo.rate_hz > 0.0)) throw ValidationError("turbo.rate_hz must be > 0");
  if (!(turbo.rate_jitter_fraction >= 0.0)) throw ValidationError("turbo.rate_jitter_fraction must be >= 0");
  if (!(turbo.hold_duty_cycle > 0.0 && turbo.hold_duty_cycle <= 1.0)) {
    throw ValidationError("turbo.hold_duty_cycle must be in (0,1]");
  }
  if (!(turbo.hold_cycle_s > 0.0)) throw ValidationError("turbo.hold_cycle_s must be > 0");
  if (!(dwell.dwell_time_s > 0.0)) throw ValidationError("dwell.dwell_time_s must be > 0");
  if (!(dwell.movement_tolerance > 0.0)) throw ValidationError("dwell.movement_tolerance must be > 0");
  if (!(dwell.refractory_s >= 0.0)) throw ValidationError("dwell.refractory_s must be >= 0");
  if (!(pinch.base_rate_hz > 0.0)) throw ValidationError("pinch.base_rate_hz must be > 0");
  if (!(pinch.fatigue_halflife_s > 0.0)) throw ValidationError("pinch.fatigue_halflife_s must be > 0");
}

namespace {

GazePoint click_at(const Trajectory& gaze, double t) {
  const Point2 p = gaze.at(t);
  return {p.x, p.y, t};
}

}  // namespace

std::vector<GazePoint> simulate_turbo(double duration_s, const Trajectory& gaze,
                                      const TurboParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double period = 1.0 / params.rate_hz;

  // Hold intervals [start, end) covering the session.
  std::vector<std::pair<double, double>> holds;
  if (params.hold_duty_cycle >= 1.0) {
    holds.emplace_back(0.0, duration_s);
  } else {
    const double on_mean = params.hold_duty_cycle * params.hold_cycle_s;
    const double off_mean = params.hold_cycle_s - on_mean;
    auto jittered = [&](double mean) { return mean * (1.0 + 0.2 * (2.0 * unit(rng) - 1.0)); };
    double t = -unit(rng) * params.hold_cycle_s;
    while (t < duration_s) {
      const double on = jittered(on_mean);
      holds.emplace_back(t, t + on);
      t += on + jittered(off_mean);
    }
  }

  std::vector<GazePoint> clicks;
  for (const auto& [start, end] : holds) {
    double next = start + unit(rng) * period;
    while (next < end && next <= duration_s) {
      if (next >= 0.0) clicks.push_back(click_at(gaze, next));
      const double z = std::clamp(normal(rng), -3.0, 3.0);
      next += period * std::max(0.05, 1.0 + params.rate_jitter_fraction * z);
    }
  }
  return clicks;
}

std::vector<GazePoint> simulate_dwell(double duration_s, const Trajectory& gaze,
                                      const DwellParams& params) {
  std::vector<GazePoint> clicks;
  if (gaze.samples.empty()) return clicks;
  const double rate = gaze.sample_rate_hz;
  const auto dwell = static_cast<std::ptrdiff_t>(std::llround(params.dwell_time_s * rate));
  const auto refractory = static_cast<std::ptrdiff_t>(std::llround(params.refractory_s * rate));
  const auto last = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(gaze.samples.size()) - 1,
                                              static_cast<std::ptrdiff_t>(std::floor(duration_s * rate + 1e-9)));
  const double tol2 = params.movement_tolerance * params.movement_tolerance;

  Point2 anchor = gaze.samples[0];
  std::ptrdiff_t anchor_since = 0;
  std::ptrdiff_t blocked_until = 0;
  for (std::ptrdiff_t i = 0; i <= last; ++i) {
    const Point2 p = gaze.samples[i];
    const double dx = p.x - anchor.x;
    const double dy = p.y - anchor.y;
    if (dx * dx + dy * dy > tol2) {
      anchor = p;
      anchor_since = std::max(i, blocked_until);
      continue;
    }
    if (i >= anchor_since && i - anchor_since >= dwell) {
      clicks.push_back({anchor.x, anchor.y, static_cast<double>(i) / rate});
      blocked_until = i + refractory;
      anchor_since = blocked_until;
    }
  }
  return clicks;
}

std::vector<GazePoint> simulate_pinch(double duration_s, const Trajectory& gaze,
                                      const PinchParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(params.base_rate_hz);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool fatigue = std::isfinite(params.fatigue_halflife_s);
  std::vector<GazePoint> clicks;
  // Thinning: candidates at the peak rate, kept with probability rate(t) / peak.
  for (double t = gap(rng); t <= duration_s; t += gap(rng)) {
    const double keep = fatigue ? std::exp2(-t / params.fatigue_halflife_s) : 1.0;
    if (unit(rng) < keep) clicks.push_back(click_at(gaze, t));
  }
  return clicks;
}

std::vector<GazePoint> simulate_clicks(double duration_s, const Trajectory& gaze,
                                       const ClickMethodModel& model, std::uint64_t seed) {
  model.validate();
  switch (model.method) {
    case SimMethod::turbo: return simulate_turbo(duration_s, gaze, model.turbo, seed);
    case SimMethod::dwell: return simulate_dwell(duration_s, gaze, model.dwell);
    case SimMethod::pinch: return simulate_pinch(duration_s, gaze, model.pinch, seed);
  }
  return {};
}

GazeSession simulate_session(const SimulationRequest& req) {
  const Trajectory gaze = simulate_scanpath(req.duration_s, req.scanpath);
  // Click-process stream decorrelated from the scanpath stream.
  const std::uint64_t click_seed = req.scanpath.seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL;
  GazeSession s;
  s.user.id = req.user_id;
  s.click_method = ClickMethod::simulated;
  s.mode = CaptureMode::video;
  s.video.name = req.video_name;
  s.video.duration_s = req.duration_s;
  s.points = simulate_clicks(req.duration_s, gaze, req.model, click_seed);
  return s;
}

namespace {

nlohmann::json halflife_json(double h) {
  return std::isfinite(h) ? nlohmann::json(h) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const SimulationRequest& r) {
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& reg : r.scanpath.regions) {
    regions.push_back({{"x", reg.center.x}, {"y", reg.center.y}, {"radius", reg.radius}, {"weight", reg.weight}});
  }
  const auto& m = r.model;
  return {
      {"method", std::string(to_string(m.method))},
      {"duration_s", r.duration_s},
      {"user_id", r.user_id},
      {"video_name", r.video_name},
      {"turbo",
       {{"rate_hz", m.turbo.rate_hz},
        {"rate_jitter_fraction", m.turbo.rate_jitter_fraction},
        {"hold_duty_cycle", m.turbo.hold_duty_cycle},
        {"hold_cycle_s", m.turbo.hold_cycle_s}}},
      {"dwell",
       {{"dwell_time_s", m.dwell.dwell_time_s},
        {"movement_tolerance", m.dwell.movement_tolerance},
        {"refractory_s", m.dwell.refractory_s}}},
      {"pinch", {{"base_rate_hz", m.pinch.base_rate_hz}, {"fatigue_halflife_s", halflife_json(m.pinch.fatigue_halflife_s)}}},
      {"scanpath",
       {{"seed", r.scanpath.seed},
        {"fixation_mu", r.scanpath.fixation_mu},
        {"fixation_sigma", r.scanpath.fixation_sigma},
        {"jump", r.scanpath.jump == JumpMode::regions ? "regions" : "uniform"},
        {"regions", std::move(regions)},
        {"region_stickiness", r.scanpath.region_stickiness},
        {"drift_per_s", r.scanpath.drift_per_s},
        {"sample_rate_hz", r.scanpath.sample_rate_hz}}},
  };
}

SimulationRequest simulation_from_json(const nlohmann::json& doc) {
  try {
    SimulationRequest r;
    auto method = parse_sim_method(doc.at("method").get<std::string>());
    if (!method) throw ParseError("unknown simulated method");
    r.model.method = *method;
    r.duration_s = doc.at("duration_s").get<double>();
    r.user_id = doc.at("user_id").get<std::string>();
    r.video_name = doc.at("video_name").get<std::string>();
    const auto& t = doc.at("turbo");
    r.model.turbo = {t.at("rate_hz").get<double>(), t.at("rate_jitter_fraction").get<double>(),
                     t.at("hold_duty_cycle").get<double>(), t.at("hold_cycle_s").get<double>()};
    const auto& d = doc.at("dwell");
    r.model.dwell = {d.at("dwell_time_s").get<double>(), d.at("movement_tolerance").get<double>(),
                     d.at("refractory_s").get<double>()};
    const auto& p = doc.at("pinch");
    r.model.pinch.base_rate_hz = p.at("base_rate_hz").get<double>();
    r.model.pinch.fatigue_halflife_s = p.at("fatigue_halflife_s").is_null()
                                           ? std::numeric_limits<double>::infinity()
                                           : p.at("fatigue_halflife_s").get<double>();
    const auto& s = doc.at("scanpath");
    r.scanpath.seed = s.at("seed").get<std::uint64_t>();
    r.scanpath.fixation_mu = s.at("fixation_mu").get<double>();
    r.scanpath.fixation_sigma = s.at("fixation_sigma").get<double>();
    r.scanpath.jump = s.at("jump").get<std::string>() == "regions" ? JumpMode::regions : JumpMode::uniform;
    r.scanpath.regions.clear();
    for (const auto& reg : s.at("regions")) {
      r.scanpath.regions.push_back({{reg.at("x").get<double>(), reg.at("y").get<double>()},
                                    reg.at("radius").get<double>(), reg.at("weight").get<double>()});
    }
    r.scanpath.region_stickiness = s.at("region_stickiness").get<double>();
    r.scanpath.drift_per_s = s.at("drift_per_s").get<double>();
    r.scanpath.sample_rate_hz = s.at("sample_rate_hz").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("malformed simulation config: {}", e.what()));
  }
}

}  // namespace itrace::sim
