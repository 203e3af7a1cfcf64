#include <gtest/gtest.h>

#include <cstdlib>

#include "itrace/errors.hpp"
#include "itrace/heatmap/frame_source.hpp"
#include "itrace/heatmap/session_ops.hpp"
#include "itrace/session_io.hpp"
#include "itrace/video/frame_folder.hpp"
#include "itrace/video/render_video.hpp"
#include "itrace/video/video_file.hpp"
#include "support/support.hpp"

using namespace itrace;
using namespace itrace::heatmap;
using namespace itrace::video;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

void write_folder(const fs::path& dir, Dims dims, double fps, int n) {
  TestPatternSource src(dims, fps, n);
  FrameFolderSink sink(dir);
  sink.open(dims, fps);
  while (auto f = src.next()) sink.write(*f);
  sink.close();
}

void write_video(const fs::path& file, Dims dims, double fps, int n) {
  TestPatternSource src(dims, fps, n);
  VideoFileSink sink(file);
  sink.open(dims, fps);
  while (auto f = src.next()) sink.write(*f);
  sink.close();
}

double mean_abs_diff(const FrameRGB& a, const FrameRGB& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) s += std::abs(int(a.pixels[i]) - int(b.pixels[i]));
  return s / a.pixels.size();
}

GazeSession session_for(const std::string& user, CaptureMode mode = CaptureMode::video) {
  GazeSession s;
  s.user.id = user;
  s.click_method = ClickMethod::pinch;
  s.mode = mode;
  s.video.name = "clip.mp4";
  s.points = {{0.5, 0.5, 0.2}, {0.25, 0.75, 0.6}};
  return s;
}

}  // namespace

TEST(FrameFolder, LosslessRoundTrip) {
  TempDir tmp;
  const Dims dims{64, 36};
  write_folder(tmp / "f", dims, 10, 7);
  const auto meta = read_folder_meta(tmp / "f");
  EXPECT_EQ(meta.frames, 7);
  EXPECT_EQ(meta.width, 64);
  EXPECT_DOUBLE_EQ(meta.fps, 10.0);
  EXPECT_TRUE(fs::exists(folder_frame_path(tmp / "f", 6)));
  FrameFolderSource src(tmp / "f");
  const auto expected = testing_support::pattern_frames(dims, 10, 7);
  for (const auto& e : expected) {
    auto f = src.next();
    ASSERT_TRUE(f);
    EXPECT_EQ(*f, e);
  }
  EXPECT_FALSE(src.next());
}

TEST(FrameFolder, MissingMetaIsDecodeError) {
  TempDir tmp;
  fs::create_directories(tmp / "empty");
  EXPECT_THROW(FrameFolderSource(tmp / "empty"), DecodeError);
  EXPECT_THROW(open_source(tmp / "empty"), DecodeError);
}

TEST(Images, PngRoundTripAndGarbage) {
  const auto f = TestPatternSource::make_frame({20, 10}, 1.5, 15);
  EXPECT_EQ(decode_image(encode_png(f)), f);
  EXPECT_THROW(decode_image("definitely not an image"), DecodeError);
}

TEST(VideoFile, Mp4RoundTrip) {
  TempDir tmp;
  const Dims dims{96, 54};
  write_video(tmp / "v.mp4", dims, 10, 12);
  VideoFileSource src(tmp / "v.mp4");
  EXPECT_EQ(src.dims(), dims);
  EXPECT_NEAR(src.fps(), 10.0, 1e-6);
  EXPECT_EQ(src.frame_count(), 12);
  const auto expected = testing_support::pattern_frames(dims, 10, 12);
  int n = 0;
  while (auto f = src.next()) {
    ASSERT_LT(n, 12);
    EXPECT_LT(mean_abs_diff(*f, expected[static_cast<std::size_t>(n)]), 12.0) << n;
    ++n;
  }
  EXPECT_EQ(n, 12);
}

TEST(VideoFile, GarbageIsDecodeError) {
  TempDir tmp;
  testing_support::spit(tmp / "bad.mp4", std::string(4096, 'x'));
  EXPECT_THROW(VideoFileSource(tmp / "bad.mp4"), DecodeError);
  EXPECT_THROW(VideoFileSource(tmp / "missing.mp4"), DecodeError);
}

TEST(VideoFile, UnknownExtensionIsEncodeError) {
  TempDir tmp;
  VideoFileSink sink(tmp / "out.xyz");
  EXPECT_THROW(sink.open({16, 16}, 10), RenderError);
}

TEST(RenderVideo, NamingAndEcho) {
  TempDir tmp;
  write_folder(tmp / "lecture", {64, 36}, 10, 10);
  auto cfg = RenderConfig{};
  cfg.fps = 10;
  cfg.hold_seconds = 0.5;
  const auto out = render_heatmap_video(tmp / "lecture", session_for("ann lee"), cfg, tmp / "out",
                                        OutputFormat::frames);
  EXPECT_EQ(out.heatmap.filename(), "lecture_ann_lee_heatmap");
  EXPECT_EQ(out.echo.filename(), "lecture_ann_lee_gaze.json");
  EXPECT_EQ(read_folder_meta(out.heatmap).frames, out.stats.heat_frames + out.stats.hold_frames);
  EXPECT_EQ(out.stats.hold_frames, 5);
  const auto echo = nlohmann::json::parse(testing_support::slurp(out.echo));
  EXPECT_EQ(echo["points"].size(), 2u);
  EXPECT_TRUE(echo["dropped"].empty());
  EXPECT_EQ(out.rendered_points, 2u);
}

TEST(RenderVideo, Mp4Output) {
  TempDir tmp;
  write_video(tmp / "clip.mp4", {64, 36}, 10, 10);
  auto cfg = RenderConfig{};
  cfg.fps = 10;
  cfg.hold_seconds = 0;
  const auto out = render_heatmap_video(tmp / "clip.mp4", session_for("u1"), cfg, tmp / "out");
  EXPECT_EQ(out.heatmap.filename(), "clip_u1_heatmap.mp4");
  VideoFileSource check(out.heatmap);
  EXPECT_EQ(check.frame_count(), 10);
}

TEST(RenderVideo, SpatialDropsAndCrops) {
  TempDir tmp;
  write_folder(tmp / "rec", {64, 40}, 10, 10);
  auto cfg = RenderConfig{};
  cfg.fps = 10;
  cfg.hold_seconds = 0;
  cfg.delay_offset_s = 0.4;
  cfg.crop_top_px = 4;
  auto s = session_for("u2", CaptureMode::spatial);
  s.points = {{0.5, 0.5, 0.1}, {0.5, 0.5, 0.8}, {0.5, 0.02, 0.9}};
  const auto out = render_heatmap_video(tmp / "rec", s, cfg, tmp / "out", OutputFormat::frames);
  EXPECT_EQ(read_folder_meta(out.heatmap).height, 36);
  EXPECT_EQ(out.dropped_points, 2u);
  EXPECT_EQ(out.rendered_points, 1u);
  const auto echo = nlohmann::json::parse(testing_support::slurp(out.echo));
  ASSERT_EQ(echo["dropped"].size(), 2u);
  EXPECT_EQ(echo["dropped"][0]["reason"], kDropBeforeRecording);
  EXPECT_EQ(echo["dropped"][1]["reason"], kDropOutsideCrop);
}

TEST(RenderVideo, AverageNaming) {
  TempDir tmp;
  write_folder(tmp / "quiz", {64, 36}, 10, 5);
  auto cfg = RenderConfig{};
  cfg.fps = 10;
  cfg.hold_seconds = 0;
  std::vector<GazeSession> ss = {session_for("a"), session_for("b")};
  const auto out = render_average_video(tmp / "quiz", ss, cfg, tmp / "out", OutputFormat::frames);
  EXPECT_EQ(out.heatmap.filename(), "quiz_avg_heatmap");
  EXPECT_EQ(out.rendered_points, 4u);
}

TEST(Sanitize, ReplacesUnsafeCharacters) {
  EXPECT_EQ(sanitize_id("a/b c.d-e_f"), "a_b_c.d-e_f");
}
