#include "slpm/lbp.hpp"

#include <cctype>

#include "slpm/dataset.hpp"
#include "slpm/error.hpp"

namespace slpm {

namespace {

class HeaderReader
{
public:
  explicit HeaderReader(const std::string& bytes) : mBytes(bytes) {}

  int number()
  {
    skip_space_and_comments();
    if (mPos >= mBytes.size() || !std::isdigit(static_cast<unsigned char>(mBytes[mPos])))
      throw ParseError("malformed PGM header", 0);
    long v = 0;
    while (mPos < mBytes.size() && std::isdigit(static_cast<unsigned char>(mBytes[mPos])))
    {
      v = v * 10 + (mBytes[mPos++] - '0');
      if (v > 1'000'000) throw ParseError("PGM header value out of range", 0);
    }
    return static_cast<int>(v);
  }

  std::size_t raster_start()
  {
    if (mPos >= mBytes.size() || !std::isspace(static_cast<unsigned char>(mBytes[mPos])))
      throw ParseError("malformed PGM header", 0);
    return mPos + 1;
  }

private:
  void skip_space_and_comments()
  {
    while (mPos < mBytes.size())
    {
      if (std::isspace(static_cast<unsigned char>(mBytes[mPos]))) ++mPos;
      else if (mBytes[mPos] == '#')
        while (mPos < mBytes.size() && mBytes[mPos] != '\n') ++mPos;
      else break;
    }
  }

  const std::string& mBytes;
  std::size_t mPos = 2;
};

} // namespace

GrayImage parse_pgm(const std::string& bytes)
{
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw ParseError("not a binary PGM (P5)", 0);
  HeaderReader header(bytes);
  GrayImage image;
  image.width = header.number();
  image.height = header.number();
  const int maxval = header.number();
  if (image.width < 1 || image.height < 1) throw ParseError("PGM has empty dimensions", 0);
  if (maxval < 1 || maxval > 255) throw ParseError("only 8-bit PGM is supported", 0);
  const std::size_t start = header.raster_start();
  const std::size_t count = static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height);
  if (bytes.size() < start + count) throw ParseError("PGM raster is truncated", 0);
  image.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                      bytes.begin() + static_cast<std::ptrdiff_t>(start + count));
  return image;
}

GrayImage load_pgm(const std::filesystem::path& path) { return parse_pgm(read_file(path)); }

std::uint8_t lbp_code(const GrayImage& image, int x, int y)
{
  static constexpr int dx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
  static constexpr int dy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
  const std::uint8_t centre = image.at(x, y);
  unsigned code = 0;
  for (int n = 0; n < 8; ++n)
  {
    code <<= 1;
    if (image.at(x + dx[n], y + dy[n]) >= centre) code |= 1u;
  }
  return static_cast<std::uint8_t>(code);
}

std::vector<double> lbp_histogram(const GrayImage& image, int gx, int gy)
{
  if (gx < 1 || gy < 1) throw DataError("LBP grid must be at least 1x1");
  const int cw = image.width / gx;
  const int ch = image.height / gy;
  if (cw < 1 || ch < 1) throw DataError("LBP grid is finer than the image");

  std::vector<double> hist(static_cast<std::size_t>(256 * gx * gy), 0.0);
  for (int y = 1; y + 1 < image.height; ++y)
  {
    if (y >= ch * gy) break;
    for (int x = 1; x + 1 < image.width; ++x)
    {
      if (x >= cw * gx) break;
      const int cell = (y / ch) * gx + (x / cw);
      hist[static_cast<std::size_t>(cell * 256 + lbp_code(image, x, y))] += 1.0;
    }
  }
  return hist;
}

std::vector<double> lbp_extract_pgm(const std::filesystem::path& path, int gx, int gy)
{
  return lbp_histogram(load_pgm(path), gx, gy);
}

} // namespace slpm
