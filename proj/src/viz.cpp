#include "grasplog/viz.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "grasplog/io.hpp"

namespace grasplog {

namespace fs = std::filesystem;

void RgbImage::set(std::size_t j, std::size_t k, std::array<std::uint8_t, 3> c) {
  if (j >= height || k >= width) return;
  std::copy(c.begin(), c.end(), data.begin() + static_cast<std::ptrdiff_t>((j * width + k) * 3));
}

std::array<std::uint8_t, 3> RgbImage::get(std::size_t j, std::size_t k) const {
  const std::size_t i = (j * width + k) * 3;
  return {data[i], data[i + 1], data[i + 2]};
}

void write_png(const fs::path& path, const RgbImage& img) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  FILE* fp = std::fopen(tmp.c_str(), "wb");
  if (!fp) throw IoError("cannot write " + tmp.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("PNG encoding failed: " + path.string());
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t j = 0; j < img.height; ++j)
    png_write_row(png, const_cast<png_bytep>(img.data.data() + j * img.width * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

std::array<std::uint8_t, 3> ramp_color(double v, double lo, double hi) {
  // Piecewise-linear approximation of viridis.
  static constexpr double stops[5][3] = {{0.267, 0.005, 0.329},
                                         {0.231, 0.322, 0.546},
                                         {0.128, 0.567, 0.551},
                                         {0.369, 0.789, 0.383},
                                         {0.993, 0.906, 0.144}};
  const double t = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) * 4.0 : 0.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  std::array<std::uint8_t, 3> out{};
  for (int c = 0; c < 3; ++c) out[static_cast<std::size_t>(c)] = to_byte(stops[i][c] * (1 - f) + stops[i + 1][c] * f);
  return out;
}

std::array<std::uint8_t, 3> diverging_color(double v, double limit) {
  const double t = std::clamp(v / limit, -1.0, 1.0);
  if (t >= 0) return {to_byte(1.0), to_byte(1.0 - 0.8 * t), to_byte(1.0 - 0.8 * t)};
  return {to_byte(1.0 + 0.8 * t), to_byte(1.0 + 0.8 * t), to_byte(1.0)};
}

RgbImage rgb_image(const SampleInput& in) {
  const std::size_t n = in.r.rows();
  RgbImage img(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) img.set(j, k, {to_byte(in.r(j, k)), to_byte(in.g(j, k)), to_byte(in.b(j, k))});
  return img;
}

RgbImage gray_image(const FloatImage& src, double lo, double hi) {
  const std::size_t n = src.rows();
  RgbImage img(src.cols(), n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < src.cols(); ++k) {
      const std::uint8_t v = to_byte(hi != lo ? (src(j, k) - lo) / (hi - lo) : 0.0);
      img.set(j, k, {v, v, v});
    }
  }
  return img;
}

RgbImage channel_image(const FloatImage& src, const FloatImage& u, double lo, double hi, bool diverging) {
  const std::size_t n = src.rows();
  RgbImage img(src.cols(), n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < src.cols(); ++k) {
      if (u(j, k) <= 0.0f) {
        img.set(j, k, {0, 0, 0});
        continue;
      }
      img.set(j, k, diverging ? diverging_color(src(j, k), hi) : ramp_color(src(j, k), lo, hi));
    }
  }
  return img;
}

namespace {

void line_pixels(double r0, double c0, double r1, double c1, std::size_t n,
                 std::vector<std::pair<std::size_t, std::size_t>>& out) {
  const int steps = static_cast<int>(std::ceil(std::max(std::abs(r1 - r0), std::abs(c1 - c0)))) + 1;
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const long r = std::lround(r0 + (r1 - r0) * t);
    const long c = std::lround(c0 + (c1 - c0) * t);
    if (r < 0 || c < 0 || r >= static_cast<long>(n) || c >= static_cast<long>(n)) continue;
    std::pair<std::size_t, std::size_t> p{static_cast<std::size_t>(r), static_cast<std::size_t>(c)};
    if (out.empty() || out.back() != p) out.push_back(p);
  }
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> rect_outline_pixels(const ImageGrid& grid,
                                                                     const OrientedRect& rect) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto c = rect.corners();
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 a = c[i], b = c[(i + 1) % 4];
    line_pixels(grid.row_of(a.y), grid.col_of(a.x), grid.row_of(b.y), grid.col_of(b.x), grid.n, out);
  }
  return out;
}

void draw_grasp(RgbImage& img, const ImageGrid& grid, const Grasp& g) {
  for (const auto& [j, k] : rect_outline_pixels(grid, encoding_rect(g))) img.set(j, k, {255, 255, 255});
  // Claw tips: lines across the log axis at +-w/2.
  const Vec2 c = unit_from_angle(g.phi) * (0.5 * g.w);
  const Vec2 e = unit_from_angle(g.phi + kPi / 2.0) * (0.5 * kEncodeBreadth);
  for (double side : {-1.0, 1.0}) {
    const Vec2 mid = g.position() + c * side;
    const Vec2 a = mid - e, b = mid + e;
    std::vector<std::pair<std::size_t, std::size_t>> px;
    line_pixels(grid.row_of(a.y), grid.col_of(a.x), grid.row_of(b.y), grid.col_of(b.x), grid.n, px);
    for (const auto& [j, k] : px) {
      img.set(j, k, {30, 60, 255});
      img.set(j, k + 1, {30, 60, 255});
    }
  }
}

std::vector<fs::path> write_sample_pngs(const fs::path& dir, const SampleRecord& rec, const ImageGrid& grid,
                                        const std::optional<Grasp>& selected) {
  std::vector<fs::path> written;
  auto put = [&](const char* name, const RgbImage& img) {
    const fs::path p = dir / name;
    write_png(p, img);
    written.push_back(p);
  };
  const SampleInput& in = rec.input;
  const GraspMap& m = rec.target;
  const RgbImage rgb = rgb_image(in);
  put("rgb.png", rgb);

  float dmin = 5.0f, dmax = 0.0f;
  for (float v : in.depth.values()) {
    dmin = std::min(dmin, v);
    dmax = std::max(dmax, v);
  }
  put("depth.png", gray_image(in.depth, dmax, dmin > dmax - 1e-3f ? dmax - 1e-3 : dmin));

  RgbImage overlay = rgb;
  for (std::size_t j = 0; j < in.mask.rows(); ++j) {
    for (std::size_t k = 0; k < in.mask.cols(); ++k) {
      if (in.mask(j, k) <= 0.0f) continue;
      const auto p = overlay.get(j, k);
      overlay.set(j, k, {static_cast<std::uint8_t>(p[0] / 2 + 127), static_cast<std::uint8_t>(p[1] / 2),
                         static_cast<std::uint8_t>(p[2] / 2)});
    }
  }
  put("mask.png", overlay);
  put("C.png", channel_image(m.c, m.u, -1.0, 1.0, true));
  put("S.png", channel_image(m.s, m.u, -1.0, 1.0, true));
  put("W.png", channel_image(m.w, m.u, 0.30, 1.55, false));
  put("U.png", gray_image(m.u, 0.0, 1.0));
  put("B.png", channel_image(m.b, m.u, 0.5, 1.0, false));

  RgbImage grasp = overlay;
  if (selected) draw_grasp(grasp, grid, *selected);
  put("grasp.png", grasp);
  return written;
}

}  // namespace grasplog
