#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "grasplog/dataset.hpp"
#include "grasplog/graspmap.hpp"

namespace grasplog {

/// 8-bit RGB raster, row-major, row 0 on top.
struct RgbImage {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(std::size_t w, std::size_t h) : width(w), height(h), data(w * h * 3, 0) {}
  void set(std::size_t j, std::size_t k, std::array<std::uint8_t, 3> c);
  std::array<std::uint8_t, 3> get(std::size_t j, std::size_t k) const;
};

void write_png(const std::filesystem::path& path, const RgbImage& img);

/// Maps [lo, hi] to a perceptually ordered blue-green-yellow ramp.
std::array<std::uint8_t, 3> ramp_color(double v, double lo, double hi);
/// Blue for negative, red for positive, white at zero.
std::array<std::uint8_t, 3> diverging_color(double v, double limit);

RgbImage rgb_image(const SampleInput& in);
RgbImage gray_image(const FloatImage& img, double lo, double hi);
RgbImage channel_image(const FloatImage& img, const FloatImage& u, double lo, double hi, bool diverging);

/// Pixels on the outline of `rect` (line segments between corner pixels).
std::vector<std::pair<std::size_t, std::size_t>> rect_outline_pixels(const ImageGrid& grid,
                                                                     const OrientedRect& rect);
/// Draws the encode rectangle and the claw-tip lines of `g`.
void draw_grasp(RgbImage& img, const ImageGrid& grid, const Grasp& g);

/// Writes rgb, depth, mask, C, S, W, U, B and grasp PNGs; returns their paths.
std::vector<std::filesystem::path> write_sample_pngs(const std::filesystem::path& dir,
                                                     const SampleRecord& rec, const ImageGrid& grid,
                                                     const std::optional<Grasp>& selected);

}  // namespace grasplog
