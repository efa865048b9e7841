#include "grasplog/image.hpp"

#include <algorithm>
#include <cmath>

namespace grasplog {

PixelWindow pixel_window(const ImageGrid& grid, const OrientedRect& rect) noexcept {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Vec2& c : rect.corners()) {
    xmin = std::min(xmin, c.x);
    xmax = std::max(xmax, c.x);
    ymin = std::min(ymin, c.y);
    ymax = std::max(ymax, c.y);
  }
  const double last = static_cast<double>(grid.n - 1);
  const double k0 = std::max(0.0, std::floor(grid.col_of(xmin)));
  const double k1 = std::min(last, std::ceil(grid.col_of(xmax)));
  const double j0 = std::max(0.0, std::floor(grid.row_of(ymax)));
  const double j1 = std::min(last, std::ceil(grid.row_of(ymin)));
  PixelWindow w;
  if (k0 > k1 || j0 > j1) return w;
  w.k0 = static_cast<std::size_t>(k0);
  w.k1 = static_cast<std::size_t>(k1);
  w.j0 = static_cast<std::size_t>(j0);
  w.j1 = static_cast<std::size_t>(j1);
  w.empty = false;
  return w;
}

std::vector<std::pair<std::size_t, std::size_t>> pixels_in_rect(const ImageGrid& grid,
                                                                const OrientedRect& rect) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const PixelWindow w = pixel_window(grid, rect);
  if (w.empty) return out;
  for (std::size_t j = w.j0; j <= w.j1; ++j)
    for (std::size_t k = w.k0; k <= w.k1; ++k)
      if (rect.contains(grid.center(j, k))) out.emplace_back(j, k);
  return out;
}

}  // namespace grasplog
