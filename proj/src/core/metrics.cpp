#include "itrace/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "itrace/errors.hpp"

namespace itrace::metrics {

double attempt_score(const PrecisionAttempt& a) {
  if (!(a.target_radius > 0.0)) throw ValidationError("target_radius must be > 0");
  const double d = std::hypot(a.click.x - a.target_center.x, a.click.y - a.target_center.y);
  return 100.0 * std::max(0.0, 1.0 - d / a.target_radius);
}

PrecisionResult precision_score(std::span<const PrecisionAttempt> attempts) {
  if (attempts.empty()) throw ValidationError("precision_score: no attempts");
  PrecisionResult r;
  for (const auto& a : attempts) r.per_attempt_scores.push_back(attempt_score(a));
  r.average_score = std::accumulate(r.per_attempt_scores.begin(), r.per_attempt_scores.end(), 0.0) /
                    static_cast<double>(r.per_attempt_scores.size());
  return r;
}

double speed_test_cps(std::span<const double> ts) {
  if (ts.size() < 2) throw ValidationError("speed test needs at least 2 clicks");
  const double elapsed = ts.back() - ts.front();
  if (!(elapsed > 0.0)) throw ValidationError("speed test elapsed time is zero");
  return static_cast<double>(ts.size() - 1) / elapsed;
}

IntervalStats interval_stats(std::span<const double> ts) {
  if (ts.size() < 2) throw ValidationError("interval statistics need at least 2 clicks");
  std::vector<double> gaps(ts.size() - 1);
  for (std::size_t i = 1; i < ts.size(); ++i) gaps[i - 1] = ts[i] - ts[i - 1];
  IntervalStats s;
  s.mean_s = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
  std::sort(gaps.begin(), gaps.end());
  const std::size_t n = gaps.size();
  s.median_s = n % 2 ? gaps[n / 2] : 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]);
  return s;
}

CpsSeries cps_timeseries(std::span<const double> ts, double start_s, double end_s, double bin_s) {
  if (!(start_s < end_s)) throw ValidationError("cps window must have start < end");
  if (!(bin_s > 0.0)) throw ValidationError("bin width must be > 0");
  CpsSeries out;
  const auto bins = static_cast<std::size_t>(std::ceil((end_s - start_s) / bin_s - 1e-9));
  out.bins.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) out.bins[i].start_s = start_s + i * bin_s;
  for (double t : ts) {
    if (t < start_s || t >= end_s) continue;
    auto i = static_cast<std::size_t>(std::floor((t - start_s) / bin_s));
    out.bins[std::min(i, bins - 1)].count++;
    out.clicks_in_window++;
  }
  for (auto& b : out.bins) {
    const double width = std::min(bin_s, end_s - b.start_s);
    b.rate = b.count / width;
  }
  out.window_mean = out.clicks_in_window / (end_s - start_s);
  return out;
}

ClickStats click_stats(std::span<const double> ts, double window_start_s, double window_end_s) {
  ClickStats s;
  s.total_clicks = ts.size();
  if (ts.size() >= 2) {
    const auto iv = interval_stats(ts);
    s.mean_interval_s = iv.mean_s;
    s.median_interval_s = iv.median_s;
  }
  if (window_start_s < window_end_s) {
    auto series = cps_timeseries(ts, window_start_s, window_end_s);
    s.mean_cps = series.window_mean;
    s.cps_series = std::move(series.bins);
  }
  return s;
}

std::vector<double> timestamps_of(const GazeSession& session) {
  std::vector<double> ts;
  ts.reserve(session.points.size());
  for (const auto& p : session.points) ts.push_back(p.t);
  return ts;
}

std::string cell_key(const std::string& method, const std::string& video) {
  return method + "/" + video;
}

std::optional<double> GroupSummary::mean(const std::string& method, const std::string& video) const {
  auto it = cells.find(cell_key(method, video));
  if (it == cells.end()) return std::nullopt;
  return it->second.mean_total_clicks;
}

GroupSummary group_summary(std::span<const SessionClickRecord> records) {
  std::set<std::string> methods;
  std::set<std::string> videos;
  std::map<std::string, std::pair<std::size_t, double>> sums;
  for (const auto& r : records) {
    methods.insert(r.method);
    videos.insert(r.video);
    auto& [n, total] = sums[cell_key(r.method, r.video)];
    ++n;
    total += static_cast<double>(r.total_clicks);
  }
  GroupSummary g;
  g.methods.assign(methods.begin(), methods.end());
  g.videos.assign(videos.begin(), videos.end());
  for (const auto& m : g.methods) {
    for (const auto& v : g.videos) {
      GroupCell cell;
      if (auto it = sums.find(cell_key(m, v)); it != sums.end()) {
        cell.sessions = it->second.first;
        cell.mean_total_clicks = it->second.second / static_cast<double>(it->second.first);
      }
      g.cells[cell_key(m, v)] = cell;
    }
  }
  return g;
}

nlohmann::json to_json(const GroupSummary& g) {
  nlohmann::json cells = nlohmann::json::object();
  for (const auto& [key, cell] : g.cells) {
    if (!cell.mean_total_clicks) {
      cells[key] = nullptr;
    } else {
      cells[key] = {{"mean_total_clicks", *cell.mean_total_clicks}, {"sessions", cell.sessions}};
    }
  }
  return {{"methods", g.methods}, {"videos", g.videos}, {"cells", std::move(cells)}};
}

nlohmann::json to_json(const ClickStats& s) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json series = nlohmann::json::array();
  for (const auto& b : s.cps_series) series.push_back({{"start_s", b.start_s}, {"clicks", b.count}});
  return {{"total_clicks", s.total_clicks},
          {"mean_cps", opt(s.mean_cps)},
          {"mean_interval_s", opt(s.mean_interval_s)},
          {"median_interval_s", opt(s.median_interval_s)},
          {"cps_series", std::move(series)}};
}

std::string to_text(const GroupSummary& g) {
  std::string out = fmt::format("{:<12}", "video");
  for (const auto& m : g.methods) out += fmt::format("{:>14}", m);
  out += '\n';
  for (const auto& v : g.videos) {
    out += fmt::format("{:<12}", v);
    for (const auto& m : g.methods) {
      auto mean = g.mean(m, v);
      out += mean ? fmt::format("{:>14.1f}", *mean) : fmt::format("{:>14}", "-");
    }
    out += '\n';
  }
  return out;
}

}  // namespace itrace::metrics
