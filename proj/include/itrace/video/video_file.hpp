#pragma once

#include <filesystem>
#include <memory>

#include "itrace/heatmap/frame_source.hpp"

namespace cv {
class VideoCapture;
class VideoWriter;
}  // namespace cv

namespace itrace::video {

/// Container video decoded through OpenCV. Throws DecodeError when the file
/// cannot be opened or yields no frames.
class VideoFileSource : public heatmap::FrameSource {
 public:
  explicit VideoFileSource(const std::filesystem::path& path);
  ~VideoFileSource() override;
  double fps() const override { return fps_; }
  heatmap::Dims dims() const override { return dims_; }
  int frame_count() const override { return count_; }
  std::optional<heatmap::FrameRGB> next() override;

 private:
  std::unique_ptr<cv::VideoCapture> cap_;
  double fps_ = 0.0;
  heatmap::Dims dims_;
  int count_ = 0;
};

/// .mp4 is written as MPEG-4 Part 2, .avi as Motion JPEG.
class VideoFileSink : public heatmap::FrameSink {
 public:
  explicit VideoFileSink(std::filesystem::path path);
  ~VideoFileSink() override;
  void open(heatmap::Dims dims, double fps) override;
  void write(const heatmap::FrameRGB& frame) override;
  void close() override;

 private:
  std::filesystem::path path_;
  std::unique_ptr<cv::VideoWriter> writer_;
  heatmap::Dims dims_;
};

/// Directory → frame folder, anything else → container video.
std::unique_ptr<heatmap::FrameSource> open_source(const std::filesystem::path& path);

}  // namespace itrace::video
