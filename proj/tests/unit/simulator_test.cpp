#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "itrace/errors.hpp"
#include "itrace/metrics.hpp"
#include "itrace/sim/click_methods.hpp"
#include "itrace/sim/scanpath.hpp"

using namespace itrace;
using namespace itrace::sim;

namespace {

Trajectory still(double d) { return stationary_trajectory(d, {0.5, 0.5}); }

std::vector<double> times(const std::vector<GazePoint>& pts) {
  std::vector<double> ts;
  for (const auto& p : pts) ts.push_back(p.t);
  return ts;
}

// Expected pinch clicks in [a, b] for rate r * 2^(-t/h).
double pinch_expected(double r, double h, double a, double b) {
  return r * h / std::log(2.0) * (std::exp2(-a / h) - std::exp2(-b / h));
}

}  // namespace

TEST(Turbo, DefaultRateOverAMinute) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto clicks = simulate_turbo(60, still(60), {}, seed);
    EXPECT_NEAR(static_cast<double>(clicks.size()), 1002.0, 1002.0 * 0.05) << seed;
    for (const auto& c : clicks) {
      EXPECT_GE(c.t, 0.0);
      EXPECT_LE(c.t, 60.0);
    }
  }
}

TEST(Turbo, DutyCycleScalesCount) {
  TurboParams p;
  p.hold_duty_cycle = 0.85;
  double sum = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) sum += simulate_turbo(60, still(60), p, seed).size();
  EXPECT_NEAR(sum / 10, 851.7, 851.7 * 0.07);
}

TEST(Turbo, JitterWithinHold) {
  for (double jitter : {0.02, 0.05, 0.2}) {
    TurboParams p;
    p.rate_jitter_fraction = jitter;
    const auto ts = times(simulate_turbo(60, still(60), p, 9));
    std::vector<double> d;
    for (std::size_t i = 1; i < ts.size(); ++i) d.push_back(ts[i] - ts[i - 1]);
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / d.size();
    double var = 0;
    for (double x : d) var += (x - mean) * (x - mean);
    const double cv = std::sqrt(var / (d.size() - 1)) / mean;
    EXPECT_LE(cv, 1.1 * jitter);
    EXPECT_GT(cv, 0.5 * jitter);
  }
}

TEST(Turbo, Deterministic) {
  TurboParams p;
  p.hold_duty_cycle = 0.5;
  EXPECT_EQ(times(simulate_turbo(30, still(30), p, 4)), times(simulate_turbo(30, still(30), p, 4)));
  EXPECT_NE(times(simulate_turbo(30, still(30), p, 4)), times(simulate_turbo(30, still(30), p, 5)));
}

TEST(Dwell, StationaryGazeFiresEveryDwellTime) {
  const auto clicks = simulate_dwell(60, still(60), {});
  EXPECT_EQ(clicks.size(), 42u);
  for (std::size_t i = 0; i < clicks.size(); ++i) EXPECT_NEAR(clicks[i].t, 1.4 * (i + 1), 1e-9);
}

TEST(Dwell, FastMotionNeverFires) {
  Trajectory t = still(60);
  for (std::size_t i = 0; i < t.samples.size(); ++i) t.samples[i] = (i % 2) ? Point2{0.1, 0.1} : Point2{0.9, 0.9};
  EXPECT_TRUE(simulate_dwell(60, t, {}).empty());
}

TEST(Dwell, SpacingRespectsRefractory) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    DwellParams p;
    p.refractory_s = 0.5;
    const auto ts = times(simulate_dwell(90, simulate_scanpath(90, ScanpathModel::video_viewing(seed)), p));
    for (std::size_t i = 1; i < ts.size(); ++i) EXPECT_GE(ts[i] - ts[i - 1], 1.9 - 1e-9);
  }
}

TEST(Dwell, ClickAtAnchor) {
  Trajectory t = still(5);
  for (std::size_t i = 0; i < t.samples.size(); ++i) t.samples[i] = {0.5 + (i % 2 ? 0.01 : 0.0), 0.5};
  const auto clicks = simulate_dwell(5, t, {});
  ASSERT_FALSE(clicks.empty());
  EXPECT_DOUBLE_EQ(clicks[0].x, 0.5);
}

TEST(Pinch, FatigueHalvesTheRate) {
  PinchParams p;
  double early = 0, late = 0;
  const int seeds = 40;
  for (int s = 1; s <= seeds; ++s) {
    const auto ts = times(simulate_pinch(130, still(130), p, s));
    for (double t : ts) {
      if (t < 10) early += 1;
      if (t >= 115 && t < 125) late += 1;
    }
  }
  EXPECT_NEAR(early / seeds, pinch_expected(6.8, 120, 0, 10), 0.05 * pinch_expected(6.8, 120, 0, 10));
  EXPECT_NEAR(late / seeds, pinch_expected(6.8, 120, 115, 125), 0.07 * pinch_expected(6.8, 120, 115, 125));
  EXPECT_NEAR(late / seeds / 10, 3.4, 0.3);
}

TEST(Pinch, InfiniteHalflifeIsPoisson) {
  PinchParams p;
  p.fatigue_halflife_s = std::numeric_limits<double>::infinity();
  double n = 0;
  for (int s = 1; s <= 10; ++s) n += simulate_pinch(100, still(100), p, s).size();
  EXPECT_NEAR(n / 10, 680, 680 * 0.04);
}

TEST(Scanpath, FixationDurationsAreLognormal) {
  ScanpathModel m;
  m.seed = 3;
  const auto tr = simulate_scanpath(2000, m);
  ASSERT_GT(tr.fixations.size(), 1000u);
  double sum = 0;
  for (std::size_t i = 0; i + 1 < tr.fixations.size(); ++i) sum += tr.fixations[i].duration_s;
  const double mean = sum / (tr.fixations.size() - 1);
  const double expected = std::exp(m.fixation_mu + m.fixation_sigma * m.fixation_sigma / 2);
  EXPECT_NEAR(mean, expected, 0.03 * expected);
}

TEST(Scanpath, PositionsInUnitSquareAndDeterministic) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ScanpathModel m = ScanpathModel::video_viewing(seed);
    m.drift_per_s = 0.3;
    const auto a = simulate_scanpath(30, m);
    EXPECT_EQ(a.samples.size(), 3001u);
    for (const auto& p : a.samples) {
      ASSERT_GE(p.x, 0.0);
      ASSERT_LE(p.x, 1.0);
      ASSERT_GE(p.y, 0.0);
      ASSERT_LE(p.y, 1.0);
    }
    const auto b = simulate_scanpath(30, m);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      ASSERT_EQ(a.samples[i].x, b.samples[i].x);
      ASSERT_EQ(a.samples[i].y, b.samples[i].y);
    }
  }
}

TEST(Scanpath, Validation) {
  ScanpathModel m;
  m.jump = JumpMode::regions;
  EXPECT_THROW(m.validate(), ValidationError);
  EXPECT_THROW(simulate_scanpath(0, ScanpathModel{}), ValidationError);
  ClickMethodModel c;
  c.turbo.hold_duty_cycle = 0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Session, SimulatedSessionIsValidAndSorted) {
  for (SimMethod m : {SimMethod::turbo, SimMethod::dwell, SimMethod::pinch}) {
    SimulationRequest req;
    req.model.method = m;
    req.scanpath = ScanpathModel::video_viewing(2);
    req.duration_s = 20;
    const auto s = simulate_session(req);
    EXPECT_EQ(s.click_method, ClickMethod::simulated);
    EXPECT_TRUE(std::is_sorted(s.points.begin(), s.points.end(),
                               [](const auto& a, const auto& b) { return a.t < b.t; }));
    for (const auto& p : s.points) {
      EXPECT_GE(p.x, 0.0);
      EXPECT_LE(p.x, 1.0);
      EXPECT_GE(p.t, 0.0);
      EXPECT_LE(p.t, 20.0);
    }
  }
}

TEST(Session, SidecarRoundTrip) {
  SimulationRequest req;
  req.model.method = SimMethod::pinch;
  req.model.pinch.fatigue_halflife_s = std::numeric_limits<double>::infinity();
  req.model.turbo.hold_duty_cycle = 0.6;
  req.scanpath = ScanpathModel::video_viewing(11);
  req.duration_s = 33;
  req.user_id = "bob";
  const auto j = to_json(req);
  EXPECT_EQ(to_json(simulation_from_json(j)), j);
  EXPECT_TRUE(std::isinf(simulation_from_json(j).model.pinch.fatigue_halflife_s));
  EXPECT_EQ(simulate_session(simulation_from_json(j)).points.size(), simulate_session(req).points.size());
  EXPECT_THROW(simulation_from_json(nlohmann::json{{"method", "turbo"}}), ParseError);
  EXPECT_EQ(group_label(SimMethod::turbo), "controller");
}

TEST(Calibration, VideoViewingDwellRate) {
  double cps = 0, interval = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto ts = times(simulate_dwell(60, simulate_scanpath(60, ScanpathModel::video_viewing(s + 100)), {}));
    cps += ts.size() / 60.0;
    interval += metrics::interval_stats(ts).mean_s;
  }
  EXPECT_GE(cps / 10, 0.3);
  EXPECT_LE(cps / 10, 0.8);
  EXPECT_GE(interval / 10, 1.9);
  EXPECT_LE(interval / 10, 2.6);
}
