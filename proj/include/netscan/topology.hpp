#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netscan/detection.hpp"
#include "netscan/netlist.hpp"
#include "netscan/raster.hpp"

namespace netscan {

enum class JumperMode : std::uint8_t { automatic, all, none };

std::string_view to_string(JumperMode m);  // "auto", "all", "none"
std::optional<JumperMode> parse_jumper_mode(std::string_view text);

struct JumperPolicy {
  JumperMode mode = JumperMode::automatic;
  // Crossing style acting as jumper; only set in automatic mode.
  std::optional<CrossingStyle> resolved_style;
};

// Bridge wins; otherwise flats are jumpers only when dots are also drawn.
JumperPolicy resolve_jumper_style(std::span<const CrossingDetection> crossings);

// Wire pixels on the ring one pixel outside `box`, one per run of adjacent
// foreground ring pixels (the run's middle), clockwise from the top-left corner.
std::vector<Point> find_port_points(const BinaryImage& wire_mask, const BBox& box);

struct PortPoint {
  std::string device_id;
  std::string port;
  Point location;
  int net_label = 0;  // component in the label map, 0 = unconnected
};

struct AssignResult {
  std::vector<PortPoint> ports;                   // bound ports only
  std::vector<std::string> unbound;               // ports that found no point
  std::optional<std::string> diagnostic;
};

// Names the detected points using the kind's terminal template: the first
// template port takes the nearest point, the rest follow clockwise.
AssignResult assign_ports(const std::string& device_id, const DeviceDetection& det,
                          std::span<const Point> points);

// Partner of port i (0-based) among n clockwise jumper ports; nullopt when n
// is odd or below 4.
std::optional<int> jumper_partner(int i, int n);

struct JumperNode {
  std::string id;
  BBox bbox;
  std::vector<PortPoint> ports;            // clockwise
  std::vector<std::pair<int, int>> pairs;  // 0-based, (i, i + n/2)
};

struct JumperBuild {
  std::vector<JumperNode> jumpers;
  std::vector<std::string> diagnostics;
};

JumperBuild build_jumpers(std::span<const CrossingDetection> crossings, const JumperPolicy& policy,
                          const BinaryImage& wire_mask);

std::string net_name(int label);

struct TrackedDevice {
  std::string id;
  DeviceLabel label;
  std::vector<PortPoint> ports;
  std::vector<std::string> unbound;
};

// Ports on one component share net "n<label>"; unbound ports get fresh
// singleton nets "x<k>". The result may hold gnd devices and Conn ports.
Netlist track_nets(const LabelMap& labels, std::span<TrackedDevice> devices,
                   std::vector<std::string>* diagnostics = nullptr);

// Merges nets touching gnd symbols into "GND", nets joined by jumper pairs,
// and Conn nets into the Gate/Base net of *_cross devices, then drops gnd
// devices and Conn ports. Idempotent.
Netlist post_process(const Netlist& provisional, std::span<const JumperNode> jumpers);

struct ConvertOptions {
  JumperMode mode = JumperMode::automatic;
  Polarity polarity = Polarity::dark_ink;
  bool keep_stages = false;
};

struct ConvertResult {
  Netlist netlist;
  std::vector<std::string> diagnostics;
  std::vector<std::pair<std::string, GrayImage>> stages;  // only with keep_stages
};

// Library entry point for externally produced detections.
ConvertResult convert(const GrayImage& image, std::span<const DeviceDetection> devices,
                      std::span<const CrossingDetection> crossings, const ConvertOptions& opts = {});
// Runs the detector first; missing orientations are filled by its classifier.
ConvertResult convert(const GrayImage& image, const Detector& detector, const ConvertOptions& opts = {});
// Encoded PNG input; throws ImageError when the bytes do not decode.
ConvertResult convert(std::span<const std::uint8_t> png_bytes, std::span<const DeviceDetection> devices,
                      std::span<const CrossingDetection> crossings, const ConvertOptions& opts = {});

}  // namespace netscan
