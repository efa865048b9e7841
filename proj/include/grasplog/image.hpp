#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "grasplog/geometry.hpp"

namespace grasplog {

/// Dense row-major 2D array. Row 0 is the top of the image.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t j, std::size_t k) noexcept {
    assert(j < rows_ && k < cols_);
    return data_[j * cols_ + k];
  }
  const T& operator()(std::size_t j, std::size_t k) const noexcept {
    assert(j < rows_ && k < cols_);
    return data_[j * cols_ + k];
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  bool same_shape(const Grid& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool operator==(const Grid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Mask = Grid<std::uint8_t>;
using FloatImage = Grid<float>;

/// Square top-down pixel grid covering [0, extent]^2.
///
/// Pixel (j, k) has its centre at x = (k + 0.5) * pitch,
/// y = (N - 1 - j + 0.5) * pitch, i.e. rows run top to bottom and y points up.
struct ImageGrid {
  std::size_t n = 256;
  double extent = 5.0;

  double pitch() const noexcept { return extent / static_cast<double>(n); }
  Vec2 center(std::size_t j, std::size_t k) const noexcept {
    const double p = pitch();
    return {(static_cast<double>(k) + 0.5) * p,
            (static_cast<double>(n - 1 - j) + 0.5) * p};
  }
  /// Fractional column/row coordinates of a world point (pixel centres are integers).
  double col_of(double x) const noexcept { return x / pitch() - 0.5; }
  double row_of(double y) const noexcept { return static_cast<double>(n - 1) - (y / pitch() - 0.5); }
};

/// Index ranges of pixels whose centres may lie inside `rect` (inclusive, clamped).
struct PixelWindow {
  std::size_t j0 = 0, j1 = 0, k0 = 0, k1 = 0;
  bool empty = true;
};
PixelWindow pixel_window(const ImageGrid& grid, const OrientedRect& rect) noexcept;

/// All pixels whose centres lie inside `rect`, row-major.
std::vector<std::pair<std::size_t, std::size_t>> pixels_in_rect(const ImageGrid& grid,
                                                                const OrientedRect& rect);

/// Counter-clockwise quarter turn of a square grid: out(j, k) = in(k, N-1-j).
template <typename T>
Grid<T> rotate90(const Grid<T>& in) {
  const std::size_t n = in.rows();
  Grid<T> out(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) out(j, k) = in(k, n - 1 - j);
  return out;
}

/// Mirror left-right.
template <typename T>
Grid<T> flip_horizontal(const Grid<T>& in) {
  Grid<T> out(in.rows(), in.cols());
  for (std::size_t j = 0; j < in.rows(); ++j)
    for (std::size_t k = 0; k < in.cols(); ++k) out(j, k) = in(j, in.cols() - 1 - k);
  return out;
}

/// Mirror top-bottom.
template <typename T>
Grid<T> flip_vertical(const Grid<T>& in) {
  Grid<T> out(in.rows(), in.cols());
  for (std::size_t j = 0; j < in.rows(); ++j)
    for (std::size_t k = 0; k < in.cols(); ++k) out(j, k) = in(in.rows() - 1 - j, k);
  return out;
}

}  // namespace grasplog
