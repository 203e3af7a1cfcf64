#pragma once

// Brute-force reference for the heatmap math. Everything here is written
// from the formulas directly, with no code shared with the library: the
// whole volume is materialized, every (point, frame) pair is visited, and
// the blur is a direct 2-D convolution with a mirrored boundary.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct Pt {
  double x, y, t;
};

struct Field {
  int w = 0, h = 0;
  std::vector<double> v;
  Field() = default;
  Field(int w_, int h_) : w(w_), h(h_), v(static_cast<std::size_t>(w_) * h_, 0.0) {}
  double& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

inline int cell(double u, int n) {
  int i = static_cast<int>(std::floor(u * n));
  if (i < 0) i = 0;
  if (i > n - 1) i = n - 1;
  return i;
}

/// frames[f] for f in [0, frame_count): sum of max(0, 1 - |f/fps - t| / fade).
inline std::vector<Field> volume(const std::vector<Pt>& pts, double fps, double fade, int frame_count,
                                 int w, int h) {
  std::vector<Field> out(frame_count, Field(w, h));
  for (int f = 0; f < frame_count; ++f) {
    for (const auto& p : pts) {
      const double wgt = 1.0 - std::fabs(f / fps - p.t) / fade;
      if (wgt > 0.0) out[f].at(cell(p.x, w), cell(p.y, h)) += wgt;
    }
  }
  return out;
}

inline double global_max(const std::vector<Field>& vol) {
  double m = 0.0;
  for (const auto& f : vol)
    for (double x : f.v) m = x > m ? x : m;
  return m;
}

/// Mirror index: ... 2 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
inline int mirror(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

/// Unnormalized taps exp(-k^2 / 2 sigma^2), k = -r..r, r = ceil(3 sigma), then
/// divided by their sum.
inline std::vector<double> taps(double sigma) {
  if (sigma <= 0.0) return {1.0};
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double s = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    s += k[i + r];
  }
  for (double& x : k) x /= s;
  return k;
}

/// Direct 2-D convolution with the outer-product kernel.
inline Field blur(const Field& in, double sigma) {
  const auto k = taps(sigma);
  const int r = static_cast<int>(k.size() / 2);
  Field out(in.w, in.h);
  for (int y = 0; y < in.h; ++y) {
    for (int x = 0; x < in.w; ++x) {
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          acc += k[dy + r] * k[dx + r] * in.at(mirror(x + dx, in.w), mirror(y + dy, in.h));
        }
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

/// Pre-colormap overlay strength of every frame: sqrt(v / M), blurred,
/// divided by the centre tap squared (when rescale), clamped to [0,1].
inline std::vector<Field> strength(const std::vector<Pt>& pts, double fps, double fade, int frame_count,
                                   int w, int h, double sigma, bool rescale) {
  auto vol = volume(pts, fps, fade, frame_count, w, h);
  const double m = global_max(vol);
  const auto k = taps(sigma);
  const double gain = rescale ? k[k.size() / 2] * k[k.size() / 2] : 1.0;
  std::vector<Field> out;
  for (auto& f : vol) {
    if (m > 0.0)
      for (double& x : f.v) x = std::sqrt(x / m);
    Field b = blur(f, sigma);
    for (double& x : b.v) {
      x /= gain;
      x = x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace oracle
