#include "itrace/sim/scanpath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "itrace/errors.hpp"

namespace itrace::sim {

void ScanpathModel::validate() const {
  if (!(fixation_sigma >= 0.0)) throw ValidationError("fixation_sigma must be >= 0");
  if (!(sample_rate_hz > 0.0)) throw ValidationError("sample_rate_hz must be > 0");
  if (!(drift_per_s >= 0.0)) throw ValidationError("drift_per_s must be >= 0");
  if (!(region_stickiness >= 0.0 && region_stickiness <= 1.0)) {
    throw ValidationError("region_stickiness must be in [0,1]");
  }
  if (jump == JumpMode::regions) {
    if (regions.empty()) throw ValidationError("regions jump mode needs at least one region");
    for (const auto& r : regions) {
      if (!(r.radius >= 0.0) || !(r.weight > 0.0)) throw ValidationError("invalid attention region");
    }
  }
}

ScanpathModel ScanpathModel::video_viewing(std::uint64_t seed) {
  ScanpathModel m;
  m.seed = seed;
  m.jump = JumpMode::regions;
  m.regions = {
      {{0.50, 0.35}, 0.018, 3.0},  // speaker
      {{0.25, 0.55}, 0.018, 1.5},  // board, left
      {{0.72, 0.55}, 0.018, 1.5},  // board, right
      {{0.50, 0.85}, 0.018, 1.0},  // captions
      {{0.88, 0.20}, 0.018, 0.5},  // distraction
  };
  m.region_stickiness = 0.73;
  m.drift_per_s = 0.01;
  return m;
}

Point2 Trajectory::at(double t) const {
  if (samples.empty()) return {};
  const double idx = std::floor(t * sample_rate_hz + 1e-9);
  if (idx <= 0.0) return samples.front();
  const auto i = std::min(static_cast<std::size_t>(idx), samples.size() - 1);
  return samples[i];
}

namespace {

Point2 clamp_unit(Point2 p) { return {std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0)}; }

std::size_t sample_count(double duration_s, double rate) {
  return static_cast<std::size_t>(std::floor(duration_s * rate + 1e-9)) + 1;
}

}  // namespace

Trajectory simulate_scanpath(double duration_s, const ScanpathModel& model) {
  if (!(duration_s > 0.0)) throw ValidationError("scanpath duration must be > 0");
  model.validate();

  std::mt19937_64 rng(model.seed);
  std::lognormal_distribution<double> fixation_length(model.fixation_mu, model.fixation_sigma);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> weights;
  for (const auto& r : model.regions) weights.push_back(r.weight);
  std::discrete_distribution<std::size_t> pick_region(weights.begin(), weights.end());

  std::size_t region = model.jump == JumpMode::regions ? pick_region(rng) : 0;
  auto next_position = [&]() -> Point2 {
    if (model.jump == JumpMode::uniform) return {unit(rng), unit(rng)};
    if (unit(rng) >= model.region_stickiness) region = pick_region(rng);
    const auto& r = model.regions[region];
    const double radius = r.radius * std::sqrt(unit(rng));
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    return clamp_unit({r.center.x + radius * std::cos(angle), r.center.y + radius * std::sin(angle)});
  };

  Trajectory traj;
  traj.sample_rate_hz = model.sample_rate_hz;
  traj.duration_s = duration_s;
  double t = 0.0;
  while (t < duration_s) {
    Fixation f;
    f.start_s = t;
    f.duration_s = fixation_length(rng);
    f.position = next_position();
    const double heading = 2.0 * std::numbers::pi * unit(rng);
    f.velocity = {model.drift_per_s * std::cos(heading), model.drift_per_s * std::sin(heading)};
    traj.fixations.push_back(f);
    t += f.duration_s;
  }

  const std::size_t n = sample_count(duration_s, model.sample_rate_hz);
  traj.samples.reserve(n);
  std::size_t fix = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double now = static_cast<double>(i) / model.sample_rate_hz;
    while (fix + 1 < traj.fixations.size() && traj.fixations[fix + 1].start_s <= now) ++fix;
    const Fixation& f = traj.fixations[fix];
    const double dt = now - f.start_s;
    traj.samples.push_back(
        clamp_unit({f.position.x + f.velocity.x * dt, f.position.y + f.velocity.y * dt}));
  }
  return traj;
}

Trajectory stationary_trajectory(double duration_s, Point2 position, double sample_rate_hz) {
  Trajectory traj;
  traj.sample_rate_hz = sample_rate_hz;
  traj.duration_s = duration_s;
  traj.samples.assign(sample_count(duration_s, sample_rate_hz), clamp_unit(position));
  traj.fixations.push_back({0.0, duration_s, clamp_unit(position), {0.0, 0.0}});
  return traj;
}

}  // namespace itrace::sim
