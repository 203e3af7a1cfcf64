#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "itrace/heatmap/frame_source.hpp"

namespace itrace::video {

/// Lossless frame-folder format: `meta.txt` (fps, width, height, frames as
/// key=value lines) plus frame_000000.png, frame_000001.png, ...
inline constexpr const char* kFolderMetaFile = "meta.txt";

struct FolderMeta {
  double fps = 0.0;
  int width = 0;
  int height = 0;
  int frames = 0;
};

/// Any image format OpenCV reads. Throws DecodeError.
heatmap::FrameRGB decode_image(std::string_view bytes);
std::string encode_png(const heatmap::FrameRGB& frame);

FolderMeta read_folder_meta(const std::filesystem::path& dir);
std::filesystem::path folder_frame_path(const std::filesystem::path& dir, int index);

class FrameFolderSource : public heatmap::FrameSource {
 public:
  explicit FrameFolderSource(std::filesystem::path dir);
  double fps() const override { return meta_.fps; }
  heatmap::Dims dims() const override { return {meta_.width, meta_.height}; }
  int frame_count() const override { return meta_.frames; }
  std::optional<heatmap::FrameRGB> next() override;

 private:
  std::filesystem::path dir_;
  FolderMeta meta_;
  int cursor_ = 0;
};

/// Writes frames as PNG; meta.txt is written on close with the final count.
class FrameFolderSink : public heatmap::FrameSink {
 public:
  explicit FrameFolderSink(std::filesystem::path dir);
  void open(heatmap::Dims dims, double fps) override;
  void write(const heatmap::FrameRGB& frame) override;
  void close() override;

 private:
  std::filesystem::path dir_;
  FolderMeta meta_;
};

}  // namespace itrace::video
