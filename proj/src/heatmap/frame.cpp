#include "itrace/heatmap/frame.hpp"

#include <algorithm>
#include <cmath>

#include "itrace/errors.hpp"

namespace itrace::heatmap {

FrameRGB::FrameRGB(int w, int h, Rgb fill) : width(w), height(h) {
  pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill[0];
    pixels[i + 1] = fill[1];
    pixels[i + 2] = fill[2];
  }
}

Rgb FrameRGB::at(int x, int y) const {
  std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void FrameRGB::set(int x, int y, Rgb c) {
  std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  pixels[i] = c[0];
  pixels[i + 1] = c[1];
  pixels[i + 2] = c[2];
}

Dims working_dims(Dims source, int working_width) {
  if (source.width <= 0 || source.height <= 0) throw ValidationError("source has zero dimensions");
  int w = std::min(working_width, source.width);
  int h = static_cast<int>(std::lround(static_cast<double>(w) * source.height / source.width));
  w -= w % 2;
  h -= h % 2;
  return {std::max(w, 2), std::max(h, 2)};
}

namespace {

struct Span {
  int first;
  std::vector<double> weights;
};

// For every destination index, the contiguous source range it covers and the
// fractional overlap of each source sample (weights sum to 1).
std::vector<Span> area_weights(int src, int dst) {
  std::vector<Span> out(dst);
  const double scale = static_cast<double>(src) / dst;
  for (int d = 0; d < dst; ++d) {
    double lo = d * scale;
    double hi = (d + 1) * scale;
    int first = std::clamp(static_cast<int>(std::floor(lo)), 0, src - 1);
    int last = std::clamp(static_cast<int>(std::ceil(hi)) - 1, first, src - 1);
    Span s{first, {}};
    double total = 0.0;
    for (int i = first; i <= last; ++i) {
      double w = std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i));
      w = std::max(w, 0.0);
      s.weights.push_back(w);
      total += w;
    }
    if (total <= 0.0) {
      s.weights.assign(1, 1.0);
      total = 1.0;
    }
    for (double& w : s.weights) w /= total;
    out[d] = std::move(s);
  }
  return out;
}

}  // namespace

FrameRGB resize_area(const FrameRGB& src, Dims target) {
  if (src.dims() == target) return src;
  if (target.width <= 0 || target.height <= 0) throw ValidationError("resize target is empty");
  const auto wx = area_weights(src.width, target.width);
  const auto wy = area_weights(src.height, target.height);

  std::vector<double> rows(static_cast<std::size_t>(src.height) * target.width * 3);
  for (int y = 0; y < src.height; ++y) {
    const std::uint8_t* in = &src.pixels[static_cast<std::size_t>(y) * src.width * 3];
    double* out = &rows[static_cast<std::size_t>(y) * target.width * 3];
    for (int x = 0; x < target.width; ++x) {
      double acc[3] = {0, 0, 0};
      const Span& s = wx[x];
      for (std::size_t k = 0; k < s.weights.size(); ++k) {
        const std::uint8_t* p = in + static_cast<std::size_t>(s.first + k) * 3;
        for (int c = 0; c < 3; ++c) acc[c] += s.weights[k] * p[c];
      }
      for (int c = 0; c < 3; ++c) out[x * 3 + c] = acc[c];
    }
  }

  FrameRGB dst(target.width, target.height);
  const std::size_t stride = static_cast<std::size_t>(target.width) * 3;
  for (int y = 0; y < target.height; ++y) {
    const Span& s = wy[y];
    for (std::size_t i = 0; i < stride; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < s.weights.size(); ++k) {
        acc += s.weights[k] * rows[(s.first + k) * stride + i];
      }
      dst.pixels[y * stride + i] = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
    }
  }
  return dst;
}

FrameRGB crop_rows(const FrameRGB& src, int top, int bottom) {
  if (top < 0 || bottom < 0 || top + bottom >= src.height) {
    throw ValidationError("crop exceeds frame height");
  }
  FrameRGB out(src.width, src.height - top - bottom);
  const std::size_t stride = static_cast<std::size_t>(src.width) * 3;
  std::copy(src.pixels.begin() + top * stride, src.pixels.begin() + (src.height - bottom) * stride,
            out.pixels.begin());
  return out;
}

}  // namespace itrace::heatmap
