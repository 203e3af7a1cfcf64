#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "itrace/heatmap/frame.hpp"

namespace itrace::heatmap {

/// A decoded video stream: fixed dimensions and rate, frames in order.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual double fps() const = 0;
  virtual Dims dims() const = 0;
  virtual int frame_count() const = 0;
  /// Next frame, or nullopt at the end of the stream.
  virtual std::optional<FrameRGB> next() = 0;
};

class FrameSink {
 public:
  virtual ~FrameSink() = default;
  virtual void open(Dims dims, double fps) = 0;
  virtual void write(const FrameRGB& frame) = 0;
  virtual void close() = 0;
};

class MemoryFrameSource : public FrameSource {
 public:
  MemoryFrameSource(std::vector<FrameRGB> frames, double fps);
  double fps() const override { return fps_; }
  Dims dims() const override;
  int frame_count() const override { return static_cast<int>(frames_.size()); }
  std::optional<FrameRGB> next() override;

 private:
  std::vector<FrameRGB> frames_;
  double fps_;
  std::size_t cursor_ = 0;
};

class MemoryFrameSink : public FrameSink {
 public:
  void open(Dims dims, double fps) override;
  void write(const FrameRGB& frame) override { frames.push_back(frame); }
  void close() override { closed = true; }

  Dims dims;
  double fps = 0.0;
  bool closed = false;
  std::vector<FrameRGB> frames;
};

/// Wraps another source and strips rows from the top and bottom of every frame.
class CroppedSource : public FrameSource {
 public:
  CroppedSource(FrameSource& inner, int top, int bottom);
  double fps() const override { return inner_.fps(); }
  Dims dims() const override;
  int frame_count() const override { return inner_.frame_count(); }
  std::optional<FrameRGB> next() override;

 private:
  FrameSource& inner_;
  int top_;
  int bottom_;
};

/// Deterministic synthetic footage: a colour gradient with the frame's
/// timestamp burned into the top-left corner.
class TestPatternSource : public FrameSource {
 public:
  TestPatternSource(Dims dims, double fps, int frame_count);
  double fps() const override { return fps_; }
  Dims dims() const override { return dims_; }
  int frame_count() const override { return count_; }
  std::optional<FrameRGB> next() override;

  static FrameRGB make_frame(Dims dims, double t_seconds, int index);

 private:
  Dims dims_;
  double fps_;
  int count_;
  int cursor_ = 0;
};

}  // namespace itrace::heatmap
