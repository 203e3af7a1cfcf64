#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "itrace/gaze_model.hpp"
#include "itrace/heatmap/frame_source.hpp"
#include "itrace/video/frame_folder.hpp"
#include "itrace/video/video_file.hpp"

namespace testing_support {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "itrace") {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = fs::temp_directory_path() / (tag + "-" + std::to_string(rng()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

/// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return uniform() < p; }

  itrace::GazePoint point(double t_max) { return {uniform(), uniform(), uniform(0.0, t_max)}; }

  /// Random points, sometimes stacked on the same cell or the same time, to
  /// exercise ties.
  std::vector<itrace::GazePoint> points(int n, double t_max) {
    std::vector<itrace::GazePoint> out;
    for (int i = 0; i < n; ++i) {
      if (!out.empty() && coin(0.15)) {
        auto p = out[static_cast<std::size_t>(integer(0, static_cast<int>(out.size()) - 1))];
        if (coin()) p.t = uniform(0.0, t_max);
        out.push_back(p);
      } else {
        out.push_back(point(t_max));
      }
    }
    return out;
  }

  itrace::GazeSession session(int n, double t_max, const std::string& video = "clip.mp4") {
    itrace::GazeSession s;
    s.user.id = "u" + std::to_string(integer(0, 9999));
    if (coin()) s.user.precision_score = uniform(0.0, 100.0);
    const itrace::ClickMethod methods[] = {itrace::ClickMethod::pinch, itrace::ClickMethod::dwell,
                                           itrace::ClickMethod::controller, itrace::ClickMethod::simulated};
    s.click_method = methods[integer(0, 3)];
    s.mode = coin() ? itrace::CaptureMode::video : itrace::CaptureMode::spatial;
    s.video.name = video;
    if (coin()) s.video.duration_s = t_max;
    s.points = points(n, t_max);
    std::stable_sort(s.points.begin(), s.points.end(),
                     [](const auto& a, const auto& b) { return a.t < b.t; });
    return s;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline std::vector<itrace::heatmap::FrameRGB> pattern_frames(itrace::heatmap::Dims dims, double fps, int count) {
  itrace::heatmap::TestPatternSource src(dims, fps, count);
  std::vector<itrace::heatmap::FrameRGB> out;
  while (auto f = src.next()) out.push_back(std::move(*f));
  return out;
}

/// Test-pattern footage written through a real sink.
inline void write_pattern(itrace::heatmap::FrameSink& sink, itrace::heatmap::Dims dims, double fps, int count) {
  itrace::heatmap::TestPatternSource src(dims, fps, count);
  sink.open(dims, fps);
  while (auto f = src.next()) sink.write(*f);
  sink.close();
}

inline void write_pattern_video(const fs::path& file, itrace::heatmap::Dims dims, double fps, int count) {
  itrace::video::VideoFileSink sink(file);
  write_pattern(sink, dims, fps, count);
}

inline void write_pattern_folder(const fs::path& dir, itrace::heatmap::Dims dims, double fps, int count) {
  itrace::video::FrameFolderSink sink(dir);
  write_pattern(sink, dims, fps, count);
}

inline itrace::GazeSession simple_session(std::vector<itrace::GazePoint> points, const std::string& user = "u1",
                                          const std::string& video = "clip.mp4") {
  itrace::GazeSession s;
  s.user.id = user;
  s.click_method = itrace::ClickMethod::pinch;
  s.mode = itrace::CaptureMode::video;
  s.video.name = video;
  s.points = std::move(points);
  return s;
}

}  // namespace testing_support
