#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace slpm {

struct GrayImage
{
  int width = 0;
  int height = 0;
  /// Row-major 8-bit pixels.
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y * width + x)]; }
};

/// Binary (P5) PGM with maxval <= 255. Throws ParseError when malformed.
GrayImage parse_pgm(const std::string& bytes);
GrayImage load_pgm(const std::filesystem::path& path);

/// 8-neighbour radius-1 code of an interior pixel. Neighbours are visited
/// clockwise from the top-left; the top-left contributes the most
/// significant bit, and a bit is set when neighbour >= centre.
std::uint8_t lbp_code(const GrayImage& image, int x, int y);

/// Concatenated 256-bin histograms of the codes of interior pixels, one per
/// grid cell (row-major, gx across by gy down). Cells are
/// floor(width / gx) by floor(height / gy) pixels; leftover pixels at the
/// right and bottom edges are dropped.
std::vector<double> lbp_histogram(const GrayImage& image, int gx, int gy);

std::vector<double> lbp_extract_pgm(const std::filesystem::path& path, int gx, int gy);

} // namespace slpm
