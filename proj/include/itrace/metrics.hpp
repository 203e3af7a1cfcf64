#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "itrace/gaze_model.hpp"

namespace itrace::metrics {

struct PrecisionResult {
  std::vector<double> per_attempt_scores;
  double average_score = 0.0;
};

/// 100 * max(0, 1 - d / radius) for the click-to-centre distance d.
double attempt_score(const PrecisionAttempt& attempt);

/// Scores every attempt and averages them. The standard test uses five.
PrecisionResult precision_score(std::span<const PrecisionAttempt> attempts);

/// (N - 1) / (t_last - t_first): the first click starts the clock.
double speed_test_cps(std::span<const double> timestamps);

struct IntervalStats {
  double mean_s = 0.0;
  double median_s = 0.0;
};

/// Mean and median of successive differences (even counts: midpoint of the
/// central pair).
IntervalStats interval_stats(std::span<const double> timestamps);

struct CpsBin {
  double start_s = 0.0;
  std::size_t count = 0;
  double rate = 0.0;  // count / bin width
};

struct CpsSeries {
  std::vector<CpsBin> bins;
  std::size_t clicks_in_window = 0;
  double window_mean = 0.0;  // clicks_in_window / (end - start)
};

/// Bins clicks with start <= t < end into consecutive bins of `bin_s`
/// seconds; the last bin may be shorter if the window is not a multiple.
CpsSeries cps_timeseries(std::span<const double> timestamps, double start_s, double end_s,
                         double bin_s = 1.0);

struct ClickStats {
  std::size_t total_clicks = 0;
  std::optional<double> mean_cps;
  std::optional<double> mean_interval_s;
  std::optional<double> median_interval_s;
  std::vector<CpsBin> cps_series;
};

/// Per-session statistics: intervals when there are at least two clicks,
/// and a per-second series over [window_start, window_end).
ClickStats click_stats(std::span<const double> timestamps, double window_start_s,
                       double window_end_s);

std::vector<double> timestamps_of(const GazeSession& session);

struct SessionClickRecord {
  std::string method;
  std::string video;
  std::size_t total_clicks = 0;
};

struct GroupCell {
  std::size_t sessions = 0;
  std::optional<double> mean_total_clicks;  // absent when the cell has no sessions
};

/// Mean total clicks for every (method, video) combination seen in the
/// input. Cells are keyed "method/video"; combinations with no sessions are
/// present but absent-valued.
struct GroupSummary {
  std::vector<std::string> methods;
  std::vector<std::string> videos;
  std::map<std::string, GroupCell> cells;

  std::optional<double> mean(const std::string& method, const std::string& video) const;
};

std::string cell_key(const std::string& method, const std::string& video);

GroupSummary group_summary(std::span<const SessionClickRecord> records);

nlohmann::json to_json(const GroupSummary& summary);
nlohmann::json to_json(const ClickStats& stats);
std::string to_text(const GroupSummary& summary);

}  // namespace itrace::metrics
