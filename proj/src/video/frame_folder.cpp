#include "itrace/video/frame_folder.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "itrace/errors.hpp"

namespace fs = std::filesystem;

namespace itrace::video {

namespace {

cv::Mat to_bgr(const heatmap::FrameRGB& frame) {
  cv::Mat rgb(frame.height, frame.width, CV_8UC3, const_cast<std::uint8_t*>(frame.pixels.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  return bgr;
}

heatmap::FrameRGB from_bgr(const cv::Mat& bgr) {
  heatmap::FrameRGB out(bgr.cols, bgr.rows);
  cv::Mat rgb(bgr.rows, bgr.cols, CV_8UC3, out.pixels.data());
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  return out;
}

}  // namespace

heatmap::FrameRGB decode_image(std::string_view bytes) {
  const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<char*>(bytes.data()));
  const cv::Mat img = bytes.empty() ? cv::Mat() : cv::imdecode(buf, cv::IMREAD_COLOR);
  if (img.empty()) throw DecodeError("cannot decode image");
  return from_bgr(img);
}

std::string encode_png(const heatmap::FrameRGB& frame) {
  std::vector<std::uint8_t> out;
  if (!cv::imencode(".png", to_bgr(frame), out)) throw RenderError("encode", "PNG encoding failed");
  return std::string(out.begin(), out.end());
}

fs::path folder_frame_path(const fs::path& dir, int index) {
  return dir / fmt::format("frame_{:06d}.png", index);
}

FolderMeta read_folder_meta(const fs::path& dir) {
  std::ifstream in(dir / kFolderMetaFile);
  if (!in) throw DecodeError(fmt::format("{}: no {} in frame folder", dir.string(), kFolderMetaFile));
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  FolderMeta m;
  try {
    m.fps = std::stod(kv.at("fps"));
    m.width = std::stoi(kv.at("width"));
    m.height = std::stoi(kv.at("height"));
    m.frames = std::stoi(kv.at("frames"));
  } catch (const std::exception&) {
    throw DecodeError(fmt::format("{}: malformed {}", dir.string(), kFolderMetaFile));
  }
  if (!(m.fps > 0.0) || m.width <= 0 || m.height <= 0 || m.frames < 0) {
    throw DecodeError(fmt::format("{}: invalid frame folder metadata", dir.string()));
  }
  return m;
}

FrameFolderSource::FrameFolderSource(fs::path dir) : dir_(std::move(dir)), meta_(read_folder_meta(dir_)) {}

std::optional<heatmap::FrameRGB> FrameFolderSource::next() {
  if (cursor_ >= meta_.frames) return std::nullopt;
  const fs::path p = folder_frame_path(dir_, cursor_);
  cv::Mat img = cv::imread(p.string(), cv::IMREAD_COLOR);
  if (img.empty()) throw DecodeError(fmt::format("cannot decode {}", p.string()));
  if (img.cols != meta_.width || img.rows != meta_.height) {
    throw DecodeError(fmt::format("{}: size {}x{} does not match metadata", p.string(), img.cols, img.rows));
  }
  ++cursor_;
  return from_bgr(img);
}

FrameFolderSink::FrameFolderSink(fs::path dir) : dir_(std::move(dir)) {}

void FrameFolderSink::open(heatmap::Dims dims, double fps) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw RenderError("encode", fmt::format("cannot create {}: {}", dir_.string(), ec.message()));
  meta_ = {fps, dims.width, dims.height, 0};
}

void FrameFolderSink::write(const heatmap::FrameRGB& frame) {
  if (frame.width != meta_.width || frame.height != meta_.height) {
    throw RenderError("encode", "frame size changed mid-stream");
  }
  const fs::path p = folder_frame_path(dir_, meta_.frames);
  if (!cv::imwrite(p.string(), to_bgr(frame), {cv::IMWRITE_PNG_COMPRESSION, 3})) {
    throw RenderError("encode", fmt::format("cannot write {}", p.string()));
  }
  ++meta_.frames;
}

void FrameFolderSink::close() {
  std::ofstream out(dir_ / kFolderMetaFile, std::ios::trunc);
  out << fmt::format("fps={}\nwidth={}\nheight={}\nframes={}\n", meta_.fps, meta_.width, meta_.height,
                     meta_.frames);
  if (!out) throw RenderError("encode", fmt::format("cannot write {}", (dir_ / kFolderMetaFile).string()));
}

}  // namespace itrace::video
