#include "netscan/detection.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace netscan {

namespace {

constexpr std::array<std::string_view, 4> kOrientationNames{"u", "r", "d", "l"};
constexpr std::array<std::string_view, 3> kCrossingNames{"bridge", "dot", "flat"};

using json = nlohmann::json;

BBox read_box(const json& j, const std::string& where, int width, int height) {
  if (!j.is_array() || j.size() != 4) throw AnnotationError(where + ": bbox must be [x, y, w, h]");
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw AnnotationError(where + ": bbox entries must be integers");
  }
  const BBox raw{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
  if (raw.w <= 0 || raw.h <= 0) throw AnnotationError(where + ": bbox has no area");
  if (raw.x < -kClampTolerance || raw.y < -kClampTolerance ||
      raw.x + raw.w > width + kClampTolerance || raw.y + raw.h > height + kClampTolerance) {
    throw AnnotationError(where + ": bbox lies outside the image");
  }
  const auto c = raw.clamped(width, height);
  if (!c) throw AnnotationError(where + ": bbox lies outside the image");
  return *c;
}

double read_confidence(const json& j, const std::string& where) {
  if (!j.contains("confidence")) return 1.0;
  if (!j["confidence"].is_number()) throw AnnotationError(where + ": confidence must be a number");
  const double c = j["confidence"].get<double>();
  if (c < 0.0 || c > 1.0) throw AnnotationError(where + ": confidence outside [0, 1]");
  return c;
}

std::string get_string(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw AnnotationError(where + ": missing string field '" + key + "'");
  }
  return j[key].get<std::string>();
}

}  // namespace

std::string_view to_string(Orientation o) { return kOrientationNames[static_cast<int>(o)]; }
std::string_view to_string(CrossingStyle s) { return kCrossingNames[static_cast<int>(s)]; }

std::optional<Orientation> parse_orientation(std::string_view text) {
  for (std::size_t i = 0; i < kOrientationNames.size(); ++i) {
    if (kOrientationNames[i] == text) return static_cast<Orientation>(i);
  }
  return std::nullopt;
}

std::optional<CrossingStyle> parse_crossing_style(std::string_view text) {
  for (std::size_t i = 0; i < kCrossingNames.size(); ++i) {
    if (kCrossingNames[i] == text) return static_cast<CrossingStyle>(i);
  }
  return std::nullopt;
}

Annotations parse_annotations(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw AnnotationError(std::string("malformed annotation JSON: ") + e.what());
  }
  if (!doc.is_object()) throw AnnotationError("annotation document must be an object");
  Annotations a;
  a.image = doc.value("image", "");
  if (!doc.contains("width") || !doc["width"].is_number_integer() || !doc.contains("height") ||
      !doc["height"].is_number_integer()) {
    throw AnnotationError("annotation needs integer width and height");
  }
  a.width = doc["width"].get<int>();
  a.height = doc["height"].get<int>();
  if (a.width <= 0 || a.height <= 0) throw AnnotationError("image size must be positive");

  const json devices = doc.value("devices", json::array());
  const json crossings = doc.value("crossings", json::array());
  if (!devices.is_array() || !crossings.is_array()) {
    throw AnnotationError("devices and crossings must be arrays");
  }
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const json& jd = devices[i];
    const std::string where = "device " + std::to_string(i);
    if (!jd.is_object()) throw AnnotationError(where + ": must be an object");
    DeviceDetection d;
    const std::string label = get_string(jd, "label", where);
    const auto parsed = parse_device_label(label);
    if (!parsed) throw AnnotationError(where + ": unknown label '" + label + "'");
    d.label = *parsed;
    if (!jd.contains("bbox")) throw AnnotationError(where + ": missing bbox");
    d.bbox = read_box(jd["bbox"], where, a.width, a.height);
    d.confidence = read_confidence(jd, where);
    if (jd.contains("orientation") && !jd["orientation"].is_null()) {
      const std::string o = jd["orientation"].is_string() ? jd["orientation"].get<std::string>() : "";
      d.orientation = parse_orientation(o);
      if (!d.orientation) throw AnnotationError(where + ": bad orientation");
    } else if (needs_orientation(d.label)) {
      throw AnnotationError(where + ": " + label + " requires an orientation");
    }
    if (jd.contains("mirror") && !jd["mirror"].is_null()) {
      if (!jd["mirror"].is_boolean()) throw AnnotationError(where + ": mirror must be boolean");
      if (!needs_mirror(d.label)) throw AnnotationError(where + ": " + label + " takes no mirror flag");
      d.mirror = jd["mirror"].get<bool>();
    } else if (needs_mirror(d.label)) {
      d.mirror = false;
    }
    a.devices.push_back(d);
  }
  for (std::size_t i = 0; i < crossings.size(); ++i) {
    const json& jc = crossings[i];
    const std::string where = "crossing " + std::to_string(i);
    if (!jc.is_object()) throw AnnotationError(where + ": must be an object");
    CrossingDetection c;
    const std::string label = get_string(jc, "label", where);
    const auto style = parse_crossing_style(label);
    if (!style) throw AnnotationError(where + ": unknown crossing label '" + label + "'");
    c.style = *style;
    if (!jc.contains("bbox")) throw AnnotationError(where + ": missing bbox");
    c.bbox = read_box(jc["bbox"], where, a.width, a.height);
    c.confidence = read_confidence(jc, where);
    a.crossings.push_back(c);
  }
  return a;
}

Annotations load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AnnotationError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_annotations(ss.str());
  } catch (const AnnotationError& e) {
    throw AnnotationError(path + ": " + e.what());
  }
}

std::string serialize_annotations(const Annotations& a) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["image"] = a.image;
  doc["width"] = a.width;
  doc["height"] = a.height;
  doc["devices"] = ojson::array();
  for (const auto& d : a.devices) {
    ojson jd;
    jd["label"] = to_string(d.label);
    jd["bbox"] = {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h};
    if (d.orientation) jd["orientation"] = to_string(*d.orientation);
    if (d.mirror) jd["mirror"] = *d.mirror;
    if (d.confidence != 1.0) jd["confidence"] = d.confidence;
    doc["devices"].push_back(std::move(jd));
  }
  doc["crossings"] = ojson::array();
  for (const auto& c : a.crossings) {
    ojson jc;
    jc["label"] = to_string(c.style);
    jc["bbox"] = {c.bbox.x, c.bbox.y, c.bbox.w, c.bbox.h};
    if (c.confidence != 1.0) jc["confidence"] = c.confidence;
    doc["crossings"].push_back(std::move(jc));
  }
  return doc.dump(2) + "\n";
}

OracleDetector::OracleDetector(Annotations a) : annotations_(std::move(a)) {
  for (auto& d : annotations_.devices) d.confidence = 1.0;
  for (auto& c : annotations_.crossings) c.confidence = 1.0;
}

std::vector<DeviceDetection> OracleDetector::detect_devices(const GrayImage&) const {
  return annotations_.devices;
}

std::vector<CrossingDetection> OracleDetector::detect_crossings(const GrayImage&) const {
  return annotations_.crossings;
}

OrientationGuess OracleDetector::classify(const GrayImage&, const BBox& box, DeviceLabel label) const {
  for (const auto& d : annotations_.devices) {
    if (d.bbox == box && d.label == label) {
      return {d.orientation.value_or(Orientation::u), d.mirror.value_or(false)};
    }
  }
  return {};
}

}  // namespace netscan
