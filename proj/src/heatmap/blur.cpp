#include "itrace/heatmap/blur.hpp"

#include <cmath>

#include "itrace/errors.hpp"

namespace itrace::heatmap {

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be >= 0");
  if (sigma == 0.0) return {1.0};
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& w : k) w /= sum;
  return k;
}

int reflect_index(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

std::vector<std::vector<GaussianBlur::Tap>> GaussianBlur::scatter_matrix(
    const std::vector<double>& kernel, int n) {
  const int radius = static_cast<int>(kernel.size() / 2);
  std::vector<std::vector<Tap>> by_source(n);
  // dest[d] = sum_j kernel[j] * src[reflect(d + j)]; reflections can map
  // several j onto the same source, so weights are merged per (source, dest).
  for (int d = 0; d < n; ++d) {
    for (int j = -radius; j <= radius; ++j) {
      int s = reflect_index(d + j, n);
      auto& taps = by_source[s];
      if (!taps.empty() && taps.back().dest == d) {
        taps.back().weight += kernel[j + radius];
      } else {
        taps.push_back({d, kernel[j + radius]});
      }
    }
  }
  return by_source;
}

GaussianBlur::GaussianBlur(double sigma, Dims dims) : sigma_(sigma), dims_(dims) {
  if (dims.width <= 0 || dims.height <= 0) throw ValidationError("blur dimensions must be non-zero");
  const auto kernel = gaussian_kernel(sigma);
  const double c = kernel[kernel.size() / 2];
  center_gain_ = c * c;
  horizontal_ = scatter_matrix(kernel, dims.width);
  vertical_ = scatter_matrix(kernel, dims.height);
}

ScalarFrame GaussianBlur::apply(const ScalarFrame& field) const {
  if (field.dims() != dims_) throw ValidationError("blur: frame size does not match");
  if (sigma_ == 0.0) return field;
  const int w = dims_.width;
  const int h = dims_.height;

  ScalarFrame rows(w, h);
  std::vector<int> live_rows;
  for (int y = 0; y < h; ++y) {
    const double* in = &field.values[static_cast<std::size_t>(y) * w];
    double* out = &rows.values[static_cast<std::size_t>(y) * w];
    bool any = false;
    for (int x = 0; x < w; ++x) {
      const double v = in[x];
      if (v == 0.0) continue;
      any = true;
      for (const Tap& t : horizontal_[x]) out[t.dest] += t.weight * v;
    }
    if (any) live_rows.push_back(y);
  }

  ScalarFrame out(w, h);
  for (int y : live_rows) {
    const double* in = &rows.values[static_cast<std::size_t>(y) * w];
    for (const Tap& t : vertical_[y]) {
      double* dst = &out.values[static_cast<std::size_t>(t.dest) * w];
      for (int x = 0; x < w; ++x) dst[x] += t.weight * in[x];
    }
  }
  return out;
}

ScalarFrame blur_frame(const ScalarFrame& field, double sigma_px) {
  if (sigma_px == 0.0) return field;
  return GaussianBlur(sigma_px, field.dims()).apply(field);
}

}  // namespace itrace::heatmap
