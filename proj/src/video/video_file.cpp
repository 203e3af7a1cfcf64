#include "itrace/video/video_file.hpp"

#include <fmt/format.h>
#include <opencv2/imgproc.hpp>
#include <opencv2/videoio.hpp>

#include "itrace/errors.hpp"
#include "itrace/video/frame_folder.hpp"

namespace fs = std::filesystem;

namespace itrace::video {

namespace {

std::unique_ptr<cv::VideoCapture> open_capture(const fs::path& path) {
  auto cap = std::make_unique<cv::VideoCapture>(path.string(), cv::CAP_FFMPEG);
  if (!cap->isOpened()) cap = std::make_unique<cv::VideoCapture>(path.string(), cv::CAP_ANY);
  if (!cap->isOpened()) throw DecodeError(fmt::format("cannot decode video {}", path.filename().string()));
  return cap;
}

}  // namespace

VideoFileSource::VideoFileSource(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw DecodeError(fmt::format("no such video {}", path.string()));
  // Container frame counts are estimates; count by grabbing, then reopen.
  auto probe = open_capture(path);
  cv::Mat first;
  if (!probe->read(first) || first.empty()) {
    throw DecodeError(fmt::format("cannot decode video {}", path.filename().string()));
  }
  dims_ = {first.cols, first.rows};
  fps_ = probe->get(cv::CAP_PROP_FPS);
  if (!(fps_ > 0.0) || fps_ > 1000.0) throw DecodeError("video reports no usable frame rate");
  count_ = 1;
  while (probe->grab()) ++count_;
  probe.reset();
  cap_ = open_capture(path);
}

VideoFileSource::~VideoFileSource() = default;

std::optional<heatmap::FrameRGB> VideoFileSource::next() {
  cv::Mat bgr;
  if (!cap_->read(bgr) || bgr.empty()) return std::nullopt;
  if (bgr.cols != dims_.width || bgr.rows != dims_.height) {
    throw DecodeError("video frame size changed mid-stream");
  }
  heatmap::FrameRGB out(bgr.cols, bgr.rows);
  cv::Mat rgb(bgr.rows, bgr.cols, CV_8UC3, out.pixels.data());
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  return out;
}

VideoFileSink::VideoFileSink(fs::path path) : path_(std::move(path)) {}

VideoFileSink::~VideoFileSink() = default;

void VideoFileSink::open(heatmap::Dims dims, double fps) {
  const std::string ext = path_.extension().string();
  int fourcc = 0;
  if (ext == ".mp4" || ext == ".m4v" || ext == ".mov") {
    fourcc = cv::VideoWriter::fourcc('m', 'p', '4', 'v');
  } else if (ext == ".avi") {
    fourcc = cv::VideoWriter::fourcc('M', 'J', 'P', 'G');
  } else {
    throw RenderError("encode", fmt::format("unsupported output container '{}'", ext));
  }
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  writer_ = std::make_unique<cv::VideoWriter>(path_.string(), cv::CAP_FFMPEG, fourcc, fps,
                                              cv::Size(dims.width, dims.height), true);
  if (!writer_->isOpened()) {
    writer_.reset();
    throw RenderError("encode", fmt::format("cannot open encoder for {}", path_.string()));
  }
  dims_ = dims;
}

void VideoFileSink::write(const heatmap::FrameRGB& frame) {
  if (!writer_) throw RenderError("encode", "encoder not open");
  if (frame.dims() != dims_) throw RenderError("encode", "frame size changed mid-stream");
  cv::Mat rgb(frame.height, frame.width, CV_8UC3, const_cast<std::uint8_t*>(frame.pixels.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  writer_->write(bgr);
}

void VideoFileSink::close() {
  if (writer_) writer_->release();
  writer_.reset();
}

std::unique_ptr<heatmap::FrameSource> open_source(const fs::path& path) {
  if (fs::is_directory(path)) return std::make_unique<FrameFolderSource>(path);
  return std::make_unique<VideoFileSource>(path);
}

}  // namespace itrace::video
