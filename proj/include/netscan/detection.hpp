#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "netscan/netlist.hpp"
#include "netscan/raster.hpp"

namespace netscan {

// Direction the symbol's reference side faces; r is u rotated 90 degrees clockwise.
enum class Orientation : std::uint8_t { u, r, d, l };
enum class CrossingStyle : std::uint8_t { bridge, dot, flat };

std::string_view to_string(Orientation o);
std::string_view to_string(CrossingStyle s);
std::optional<Orientation> parse_orientation(std::string_view text);
std::optional<CrossingStyle> parse_crossing_style(std::string_view text);

struct DeviceDetection {
  BBox bbox;
  DeviceLabel label = DeviceLabel::resistor_1;
  double confidence = 1.0;
  std::optional<Orientation> orientation;
  std::optional<bool> mirror;

  bool operator==(const DeviceDetection&) const = default;
};

struct CrossingDetection {
  BBox bbox;
  CrossingStyle style = CrossingStyle::dot;
  double confidence = 1.0;

  bool operator==(const CrossingDetection&) const = default;
};

// One annotation file: a single image and everything drawn on it.
struct Annotations {
  std::string image;
  int width = 0;
  int height = 0;
  std::vector<DeviceDetection> devices;
  std::vector<CrossingDetection> crossings;

  bool operator==(const Annotations&) const = default;
};

class AnnotationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Boxes may overhang the image by this many pixels before they are rejected.
inline constexpr int kClampTolerance = 4;

// Validates labels, orientation/mirror requirements and box geometry; boxes
// are clamped to the image.
Annotations parse_annotations(std::string_view json_text);
Annotations load_annotations(const std::string& path);
std::string serialize_annotations(const Annotations& a);

struct OrientationGuess {
  Orientation orientation = Orientation::u;
  bool mirror = false;
};

class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<DeviceDetection> detect_devices(const GrayImage& image) const = 0;
  virtual std::vector<CrossingDetection> detect_crossings(const GrayImage& image) const = 0;
  // Orientation classifier applied to one detected box.
  virtual OrientationGuess classify(const GrayImage& image, const BBox& box, DeviceLabel label) const = 0;
  // False if the instance must not be shared between batch workers.
  virtual bool thread_safe() const { return true; }
};

// Replays annotations with confidence 1.
class OracleDetector : public Detector {
 public:
  explicit OracleDetector(Annotations a);

  std::vector<DeviceDetection> detect_devices(const GrayImage& image) const override;
  std::vector<CrossingDetection> detect_crossings(const GrayImage& image) const override;
  OrientationGuess classify(const GrayImage& image, const BBox& box, DeviceLabel label) const override;

 private:
  Annotations annotations_;
};

}  // namespace netscan
