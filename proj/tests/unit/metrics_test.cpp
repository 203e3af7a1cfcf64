#include <gtest/gtest.h>

#include "itrace/errors.hpp"
#include "itrace/metrics.hpp"
#include "support/support.hpp"

using namespace itrace;
using namespace itrace::metrics;

namespace {

PrecisionAttempt at_distance(double d, double r = 0.2) { return {{d, 0.0}, {0.0, 0.0}, r}; }

std::vector<double> uniform_stream(double start, double step, int n) {
  std::vector<double> ts;
  for (int i = 0; i < n; ++i) ts.push_back(start + step * i);
  return ts;
}

}  // namespace

TEST(Precision, Examples) {
  const double r = 0.2;
  EXPECT_DOUBLE_EQ(attempt_score(at_distance(0.0)), 100.0);
  EXPECT_DOUBLE_EQ(attempt_score(at_distance(r)), 0.0);
  EXPECT_DOUBLE_EQ(attempt_score(at_distance(r / 4)), 75.0);
  EXPECT_DOUBLE_EQ(attempt_score(at_distance(3 * r)), 0.0);
  const std::vector<PrecisionAttempt> five = {at_distance(0), at_distance(r / 4), at_distance(r / 4),
                                              at_distance(r / 2), at_distance(r)};
  const auto res = precision_score(five);
  EXPECT_EQ(res.per_attempt_scores.size(), 5u);
  EXPECT_NEAR(res.average_score, 60.0, 1e-9);
  EXPECT_THROW(precision_score({}), ValidationError);
  EXPECT_THROW(attempt_score({{0, 0}, {0, 0}, 0.0}), ValidationError);
}

TEST(Precision, ScaleInvariantAndDecreasing) {
  testing_support::Gen gen(31);
  for (int i = 0; i < 500; ++i) {
    PrecisionAttempt a{{gen.uniform(), gen.uniform()}, {gen.uniform(), gen.uniform()}, gen.uniform(0.01, 1.0)};
    const double k = gen.uniform(0.1, 10.0);
    PrecisionAttempt b{{a.click.x * k, a.click.y * k}, {a.target_center.x * k, a.target_center.y * k},
                       a.target_radius * k};
    EXPECT_NEAR(attempt_score(a), attempt_score(b), 1e-9);
  }
  double prev = 101.0;
  for (int i = 0; i <= 100; ++i) {
    const double s = attempt_score(at_distance(0.2 * i / 100.0));
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(SpeedTest, Examples) {
  EXPECT_DOUBLE_EQ(speed_test_cps(uniform_stream(0, 0.5, 20)), 2.0);
  EXPECT_DOUBLE_EQ(speed_test_cps(std::vector<double>{0.0, 1.0}), 1.0);
  EXPECT_NEAR(speed_test_cps(uniform_stream(3.0, 1.138 / 19, 20)), 16.7, 0.05);
  EXPECT_THROW(speed_test_cps(std::vector<double>{1.0}), ValidationError);
  EXPECT_THROW(speed_test_cps(std::vector<double>{1.0, 1.0}), ValidationError);
}

TEST(Intervals, Examples) {
  const auto s = interval_stats(std::vector<double>{0, 1, 3});
  EXPECT_DOUBLE_EQ(s.mean_s, 1.5);
  EXPECT_DOUBLE_EQ(s.median_s, 1.5);
  const auto odd = interval_stats(std::vector<double>{0, 1, 3, 3.5});
  EXPECT_DOUBLE_EQ(odd.median_s, 1.0);
  EXPECT_NEAR(interval_stats(uniform_stream(0, 1 / 14.22, 400)).mean_s, 0.0703, 1e-4);
  EXPECT_THROW(interval_stats(std::vector<double>{0}), ValidationError);
}

TEST(Intervals, UniformIdentity) {
  testing_support::Gen gen(32);
  for (int i = 0; i < 200; ++i) {
    // Dyadic spacing keeps every difference exact in binary floating point.
    const double step = std::ldexp(1.0, -gen.integer(0, 6)) * gen.integer(1, 9);
    const auto ts = uniform_stream(gen.integer(0, 8), step, gen.integer(2, 60));
    EXPECT_EQ(speed_test_cps(ts), 1.0 / interval_stats(ts).mean_s);
  }
}

TEST(CpsSeries, Examples) {
  std::vector<double> ts;
  for (int i = 0; i <= 500; ++i) ts.push_back(i * 0.1 + 0.05);
  const auto s = cps_timeseries(ts, 10, 40);
  ASSERT_EQ(s.bins.size(), 30u);
  for (const auto& b : s.bins) EXPECT_DOUBLE_EQ(b.rate, 10.0);
  EXPECT_DOUBLE_EQ(s.window_mean, 10.0);
  const auto empty = cps_timeseries(std::vector<double>{1.0, 50.0}, 10, 40);
  for (const auto& b : empty.bins) EXPECT_EQ(b.count, 0u);
  EXPECT_EQ(empty.window_mean, 0.0);
  EXPECT_THROW(cps_timeseries(ts, 5, 5), ValidationError);
}

TEST(CpsSeries, BinsPartitionWindow) {
  testing_support::Gen gen(33);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> ts;
    for (int k = gen.integer(0, 100); k > 0; --k) ts.push_back(gen.uniform(0, 50));
    std::sort(ts.begin(), ts.end());
    const double a = gen.uniform(0, 20);
    const double b = a + gen.uniform(0.5, 30);
    const auto s = cps_timeseries(ts, a, b, gen.uniform(0.3, 3.0));
    std::size_t sum = 0;
    for (const auto& bin : s.bins) sum += bin.count;
    const auto in_window = std::count_if(ts.begin(), ts.end(), [&](double t) { return t >= a && t < b; });
    EXPECT_EQ(sum, static_cast<std::size_t>(in_window));
    EXPECT_EQ(s.clicks_in_window, static_cast<std::size_t>(in_window));
  }
}

TEST(ClickStatsTest, IntervalsOnlyWithTwoClicks) {
  const auto one = click_stats(std::vector<double>{1.0}, 0, 10);
  EXPECT_EQ(one.total_clicks, 1u);
  EXPECT_FALSE(one.mean_interval_s);
  const auto j = to_json(one);
  EXPECT_TRUE(j["mean_interval_s"].is_null());
  const auto two = click_stats(std::vector<double>{1.0, 3.0}, 0, 10);
  EXPECT_DOUBLE_EQ(*two.mean_interval_s, 2.0);
  EXPECT_DOUBLE_EQ(*two.mean_cps, 0.2);
}

TEST(GroupSummaryTest, MeanAbsentCellsAndKeys) {
  const std::vector<SessionClickRecord> recs = {
      {"dwell", "lecture", 20}, {"dwell", "lecture", 30}, {"controller", "quiz", 1000}};
  const auto g = group_summary(recs);
  EXPECT_DOUBLE_EQ(*g.mean("dwell", "lecture"), 25.0);
  EXPECT_FALSE(g.mean("dwell", "quiz").has_value());
  EXPECT_TRUE(g.cells.count("dwell/quiz"));
  const auto j = to_json(g);
  EXPECT_TRUE(j["cells"]["dwell/quiz"].is_null());
  EXPECT_DOUBLE_EQ(j["cells"]["dwell/lecture"]["mean_total_clicks"].get<double>(), 25.0);
  EXPECT_NE(to_text(g).find("dwell"), std::string::npos);
}

TEST(GroupSummaryTest, PermutationInvariant) {
  testing_support::Gen gen(34);
  for (int i = 0; i < 50; ++i) {
    std::vector<SessionClickRecord> recs;
    for (int k = gen.integer(1, 30); k > 0; --k) {
      recs.push_back({gen.coin() ? "dwell" : "pinch", gen.coin() ? "lecture" : "quiz",
                      static_cast<std::size_t>(gen.integer(0, 1000))});
    }
    const auto a = to_json(group_summary(recs));
    std::shuffle(recs.begin(), recs.end(), gen.engine());
    const auto b = to_json(group_summary(recs));
    for (const auto& [k, v] : a["cells"].items()) {
      if (v.is_null()) {
        EXPECT_TRUE(b["cells"][k].is_null());
      } else {
        EXPECT_NEAR(v["mean_total_clicks"].get<double>(), b["cells"][k]["mean_total_clicks"].get<double>(), 1e-9);
      }
    }
  }
}
