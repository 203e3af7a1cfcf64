#pragma once

#include <vector>

#include "itrace/heatmap/frame.hpp"

namespace itrace::heatmap {

/// Normalized 1-D Gaussian taps for offsets -r..r with r = ceil(3 sigma).
/// sigma == 0 yields the single tap {1}.
std::vector<double> gaussian_kernel(double sigma);

/// Symmetric reflection of an arbitrary index into [0, n) (edge sample repeated).
int reflect_index(int i, int n);

/// Separable Gaussian blur with reflective boundaries for a fixed frame size.
///
/// Each axis is stored as a sparse banded matrix (for every source index,
/// the destinations it feeds and with what weight). Applying it skips zero
/// cells and zero rows, so the cost of a frame holding a handful of gaze
/// impulses is proportional to the impulses, not the frame area.
class GaussianBlur {
 public:
  GaussianBlur(double sigma, Dims dims);

  ScalarFrame apply(const ScalarFrame& field) const;

  double sigma() const { return sigma_; }
  /// Value a unit impulse far from the borders has at its own cell after blurring.
  double center_gain() const { return center_gain_; }

 private:
  struct Tap {
    int dest;
    double weight;
  };
  static std::vector<std::vector<Tap>> scatter_matrix(const std::vector<double>& kernel, int n);

  double sigma_;
  Dims dims_;
  double center_gain_ = 1.0;
  std::vector<std::vector<Tap>> horizontal_;
  std::vector<std::vector<Tap>> vertical_;
};

ScalarFrame blur_frame(const ScalarFrame& field, double sigma_px);

}  // namespace itrace::heatmap
