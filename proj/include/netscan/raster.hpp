#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace netscan {

struct Point {
  int x = 0;
  int y = 0;

  bool operator==(const Point&) const = default;
};

// Axis-aligned pixel box, origin top-left; covers x..x+w-1, y..y+h-1.
struct BBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w - 1; }
  int bottom() const { return y + h - 1; }
  bool contains(Point p) const { return p.x >= x && p.x <= right() && p.y >= y && p.y <= bottom(); }
  // Intersection with a width x height image; nullopt when nothing remains.
  std::optional<BBox> clamped(int width, int height) const;

  bool operator==(const BBox&) const = default;
};

// Row-major 8-bit plane. The tag keeps gray and binary images apart.
template <class Tag>
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, std::uint8_t fill = 0)
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::uint8_t operator()(int x, int y) const { return data_[index(x, y)]; }
  std::uint8_t& operator()(int x, int y) { return data_[index(x, y)]; }
  // Out-of-bounds reads return 0.
  std::uint8_t get(int x, int y) const { return in_bounds(x, y) ? data_[index(x, y)] : 0; }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  bool operator==(const Plane&) const = default;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

using GrayImage = Plane<struct GrayTag>;      // 0 = black, 255 = white
using BinaryImage = Plane<struct BinaryTag>;  // 1 = ink

struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<int> labels;  // 0 = background, components 1..count
  int count = 0;

  int at(int x, int y) const {
    return (x < 0 || y < 0 || x >= width || y >= height) ? 0 : labels[static_cast<std::size_t>(y) * width + x];
  }
};

enum class Polarity : std::uint8_t { dark_ink, light_ink };

struct BinarizeResult {
  BinaryImage image;
  int threshold = 0;
  bool constant = false;  // no threshold exists; image is all background
};

// Threshold maximizing between-class variance of the 256-bin histogram,
// splitting intensities into [0, t) and [t, 255]. Ties resolve to the middle
// of the maximal plateau. nullopt for constant images.
std::optional<int> otsu_threshold(const GrayImage& img);

// Dark ink (intensity < threshold) maps to 1 unless polarity is light_ink.
BinarizeResult binarize(const GrayImage& img, Polarity polarity = Polarity::dark_ink);

// Zhang-Suen thinning followed by removal of pixels that still form 2x2
// blocks; the cleanup may close one-pixel holes. Deletions are re-checked
// one pixel at a time, so components never split or vanish. Never adds
// foreground.
BinaryImage skeletonize(const BinaryImage& img);

bool has_2x2_block(const BinaryImage& img);

BinaryImage fill_boxes(BinaryImage img, std::span<const BBox> boxes);
BinaryImage erase_boxes(BinaryImage img, std::span<const BBox> boxes);

// 8-connected labeling; labels follow raster order of each component's first pixel.
LabelMap label_components(const BinaryImage& img);

// Clears every 8-connected component smaller than `ratio` times the largest.
BinaryImage remove_small_components(const BinaryImage& img, double ratio = 0.1);

// Luma conversion with 0.299/0.587/0.114 weights.
GrayImage rgb_to_gray(int width, int height, std::span<const std::uint8_t> rgb);

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GrayImage decode_png(std::span<const std::uint8_t> bytes);
GrayImage read_png(const std::string& path);
std::vector<std::uint8_t> encode_png(const GrayImage& img);
void write_png(const std::string& path, const GrayImage& img);
// Ink rendered black on white.
GrayImage to_gray(const BinaryImage& img);

}  // namespace netscan
