#include "netscan/topology.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "netscan/symbols.hpp"

namespace netscan {

std::string_view to_string(JumperMode m) {
  switch (m) {
    case JumperMode::automatic:
      return "auto";
    case JumperMode::all:
      return "all";
    case JumperMode::none:
      return "none";
  }
  return "auto";
}

std::optional<JumperMode> parse_jumper_mode(std::string_view text) {
  if (text == "auto") return JumperMode::automatic;
  if (text == "all") return JumperMode::all;
  if (text == "none") return JumperMode::none;
  return std::nullopt;
}

JumperPolicy resolve_jumper_style(std::span<const CrossingDetection> crossings) {
  bool bridge = false, dot = false, flat = false;
  for (const auto& c : crossings) {
    bridge |= c.style == CrossingStyle::bridge;
    dot |= c.style == CrossingStyle::dot;
    flat |= c.style == CrossingStyle::flat;
  }
  JumperPolicy p;
  if (bridge) {
    p.resolved_style = CrossingStyle::bridge;
  } else if (dot && flat) {
    p.resolved_style = CrossingStyle::flat;
  }
  return p;
}

std::vector<Point> find_port_points(const BinaryImage& wire_mask, const BBox& box) {
  const int n = ring_length(box);
  std::vector<std::uint8_t> on(n);
  for (int k = 0; k < n; ++k) {
    const Point p = ring_at(box, k);
    on[k] = wire_mask.get(p.x, p.y);
  }
  std::vector<Point> out;
  if (std::all_of(on.begin(), on.end(), [](auto v) { return v != 0; })) {
    out.push_back(ring_at(box, n / 2));
    return out;
  }
  // Start scanning right after a background pixel so no run wraps.
  int start = 0;
  while (on[start]) ++start;
  std::vector<int> mids;
  for (int k = 1; k <= n; ++k) {
    const int pos = (start + k) % n;
    if (!on[pos]) continue;
    int len = 0;
    while (on[(pos + len) % n]) ++len;
    mids.push_back((pos + len / 2) % n);
    k += len;
  }
  std::sort(mids.begin(), mids.end());
  for (int m : mids) out.push_back(ring_at(box, m));
  return out;
}

namespace {

long dist2(Point a, Point b) {
  const long dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

}  // namespace

AssignResult assign_ports(const std::string& device_id, const DeviceDetection& det,
                          std::span<const Point> points) {
  const DeviceKind& kind = device_kind(det.label);
  const Orientation o = det.orientation.value_or(Orientation::u);
  const bool mirror = det.mirror.value_or(false);
  std::vector<TerminalSlot> slots = terminal_template(det.label, true);
  const bool has_extra = kind.has_body || kind.is_cross;
  if (has_extra && points.size() + 1 == slots.size()) slots.pop_back();
  for (auto& s : slots) s = transform(s, o, mirror);

  AssignResult r;
  const int n = static_cast<int>(slots.size());
  if (static_cast<int>(points.size()) == n) {
    std::vector<int> slot_order(n);
    std::iota(slot_order.begin(), slot_order.end(), 0);
    std::vector<int> slot_pos(n);
    for (int k = 0; k < n; ++k) slot_pos[k] = ring_position(det.bbox, ring_point(det.bbox, slots[k]));
    std::stable_sort(slot_order.begin(), slot_order.end(),
                     [&](int a, int b) { return slot_pos[a] < slot_pos[b]; });
    const Point anchor = ring_point(det.bbox, slots[0]);
    int best = 0;
    for (int k = 1; k < n; ++k) {
      if (dist2(points[k], anchor) < dist2(points[best], anchor)) best = k;
    }
    const int anchor_rank =
        static_cast<int>(std::find(slot_order.begin(), slot_order.end(), 0) - slot_order.begin());
    for (int k = 0; k < n; ++k) {
      const int slot = slot_order[(anchor_rank + k) % n];
      const Point p = points[(best + k) % n];
      r.ports.push_back({device_id, std::string(slots[slot].port), p, 0});
    }
    return r;
  }

  r.diagnostic = "device " + device_id + " (" + std::string(kind.annotation) + "): expected " +
                 std::to_string(n) + " port points, found " + std::to_string(points.size());
  // Closest (slot, point) pairs first.
  std::vector<std::tuple<long, int, int>> pairs;
  for (int k = 0; k < n; ++k) {
    const Point want = ring_point(det.bbox, slots[k]);
    for (int q = 0; q < static_cast<int>(points.size()); ++q) pairs.emplace_back(dist2(points[q], want), k, q);
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<int> point_of(n, -1);
  std::vector<bool> used(points.size(), false);
  for (auto [d, k, q] : pairs) {
    if (point_of[k] >= 0 || used[q]) continue;
    point_of[k] = q;
    used[q] = true;
  }
  for (int k = 0; k < n; ++k) {
    if (point_of[k] < 0) {
      r.unbound.emplace_back(slots[k].port);
    } else {
      r.ports.push_back({device_id, std::string(slots[k].port), points[point_of[k]], 0});
    }
  }
  return r;
}

std::optional<int> jumper_partner(int i, int n) {
  if (n < 4 || n % 2 != 0 || i < 0 || i >= n) return std::nullopt;
  return (i + n / 2) % n;
}

JumperBuild build_jumpers(std::span<const CrossingDetection> crossings, const JumperPolicy& policy,
                          const BinaryImage& wire_mask) {
  JumperBuild out;
  if (policy.mode == JumperMode::none) return out;
  for (std::size_t c = 0; c < crossings.size(); ++c) {
    const auto& x = crossings[c];
    if (policy.mode == JumperMode::automatic && x.style != policy.resolved_style) continue;
    const auto points = find_port_points(wire_mask, x.bbox);
    const int n = static_cast<int>(points.size());
    if (!jumper_partner(0, n)) {
      out.diagnostics.push_back("crossing " + std::to_string(c) + " (" + std::string(to_string(x.style)) +
                                "): " + std::to_string(n) + " wire ends, treated as a connection");
      continue;
    }
    JumperNode j;
    j.id = "J" + std::to_string(out.jumpers.size() + 1);
    j.bbox = x.bbox;
    for (int k = 0; k < n; ++k) j.ports.push_back({j.id, "P" + std::to_string(k + 1), points[k], 0});
    for (int k = 0; k < n / 2; ++k) j.pairs.emplace_back(k, *jumper_partner(k, n));
    out.jumpers.push_back(std::move(j));
  }
  return out;
}

std::string net_name(int label) { return "n" + std::to_string(label); }

Netlist track_nets(const LabelMap& labels, std::span<TrackedDevice> devices,
                   std::vector<std::string>* diagnostics) {
  int fresh = 0;
  auto fresh_net = [&](const std::string& dev, const std::string& port, const char* why) {
    if (diagnostics) diagnostics->push_back("device " + dev + " port " + port + ": " + why);
    return "x" + std::to_string(++fresh);
  };
  std::vector<Device> out;
  for (auto& td : devices) {
    Device d;
    d.id = td.id;
    d.label = td.label;
    for (auto& p : td.ports) {
      p.net_label = labels.at(p.location.x, p.location.y);
      d.ports.push_back(
          {p.port, p.net_label > 0 ? net_name(p.net_label) : fresh_net(td.id, p.port, "no wire at port point")});
    }
    for (const auto& u : td.unbound) d.ports.push_back({u, fresh_net(td.id, u, "no port point")});
    out.push_back(std::move(d));
  }
  return make_netlist(std::move(out));
}

namespace {

// "n2" < "n10"; non-numeric suffixes fall back to plain comparison.
bool natural_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) {
    std::size_t k = s.size();
    while (k > 0 && std::isdigit(static_cast<unsigned char>(s[k - 1]))) --k;
    return std::pair<std::string, std::string>{s.substr(0, k), s.substr(k)};
  };
  const auto [pa, na] = split(a);
  const auto [pb, nb] = split(b);
  if (pa != pb) return pa < pb;
  if (na.size() != nb.size()) return na.size() < nb.size();
  return na < nb;
}

class NetUnion {
 public:
  int id(const std::string& name) {
    auto [it, inserted] = index_.try_emplace(name, static_cast<int>(names_.size()));
    if (inserted) {
      names_.push_back(name);
      parent_.push_back(static_cast<int>(parent_.size()));
    }
    return it->second;
  }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(const std::string& a, const std::string& b) {
    const int ra = find(id(a)), rb = find(id(b));
    if (ra != rb) parent_[rb] = ra;
  }
  // Final name per class: GND if the class holds it, else the smallest member.
  std::map<std::string, std::string> names() {
    std::map<int, std::string> best;
    for (std::size_t k = 0; k < names_.size(); ++k) {
      const int r = find(static_cast<int>(k));
      auto it = best.find(r);
      const std::string& n = names_[k];
      if (it == best.end()) {
        best.emplace(r, n);
      } else if (it->second != kGroundNet && (n == kGroundNet || natural_less(n, it->second))) {
        it->second = n;
      }
    }
    std::map<std::string, std::string> out;
    for (std::size_t k = 0; k < names_.size(); ++k) out[names_[k]] = best[find(static_cast<int>(k))];
    return out;
  }

 private:
  std::map<std::string, int> index_;
  std::vector<std::string> names_;
  std::vector<int> parent_;
};

}  // namespace

Netlist post_process(const Netlist& provisional, std::span<const JumperNode> jumpers) {
  NetUnion u;
  const std::string gnd(kGroundNet);
  for (const auto& d : provisional.devices()) {
    for (const auto& b : d.ports) u.id(b.net);
    if (d.label == DeviceLabel::gnd) {
      for (const auto& b : d.ports) u.unite(gnd, b.net);
    }
  }
  for (const auto& j : jumpers) {
    for (auto [a, b] : j.pairs) {
      const auto& pa = j.ports[a];
      const auto& pb = j.ports[b];
      if (pa.net_label > 0 && pb.net_label > 0) u.unite(net_name(pa.net_label), net_name(pb.net_label));
    }
  }
  for (const auto& d : provisional.devices()) {
    const DeviceKind& kind = device_kind(d.label);
    const std::string* conn = d.net_of(kConnPort);
    const std::string* gate = d.net_of(kind.ports.front());
    if (kind.is_cross && conn && gate) u.unite(*gate, *conn);
  }
  const auto rename = u.names();
  std::vector<Device> out;
  for (const auto& d : provisional.devices()) {
    if (d.label == DeviceLabel::gnd) continue;
    Device r;
    r.id = d.id;
    r.label = d.label;
    for (const auto& b : d.ports) {
      if (b.port == kConnPort) continue;
      r.ports.push_back({b.port, rename.at(b.net)});
    }
    out.push_back(std::move(r));
  }
  return make_netlist(std::move(out), false);
}

namespace {

std::string id_prefix(DeviceLabel label) {
  const DeviceKind& k = device_kind(label);
  switch (k.group) {
    case DeviceGroup::MOS:
      return "M";
    case DeviceGroup::BJT:
      return "Q";
    case DeviceGroup::Amp:
      return "U";
    case DeviceGroup::Diode:
      return "D";
    case DeviceGroup::Gnd:
      return "G";
    case DeviceGroup::Source:
      return label == DeviceLabel::current ? "I" : "V";
    case DeviceGroup::Passive:
      if (label == DeviceLabel::capacitor) return "C";
      if (label == DeviceLabel::inductor) return "L";
      return "R";
  }
  return "X";
}

}  // namespace

ConvertResult convert(const GrayImage& image, std::span<const DeviceDetection> devices,
                      std::span<const CrossingDetection> crossings, const ConvertOptions& opts) {
  ConvertResult r;
  const auto bin = binarize(image, opts.polarity);
  if (bin.constant) r.diagnostics.push_back("constant image: no threshold, nothing drawn");
  const BinaryImage skeleton = skeletonize(bin.image);

  std::vector<DeviceDetection> dets;
  for (std::size_t k = 0; k < devices.size(); ++k) {
    auto c = devices[k].bbox.clamped(image.width(), image.height());
    if (!c) {
      r.diagnostics.push_back("device detection " + std::to_string(k) + " lies outside the image");
      continue;
    }
    dets.push_back(devices[k]);
    dets.back().bbox = *c;
  }
  std::vector<BBox> device_boxes;
  for (const auto& d : dets) device_boxes.push_back(d.bbox);
  const BinaryImage filled = fill_boxes(skeleton, device_boxes);
  const BinaryImage pruned = remove_small_components(filled);

  JumperPolicy policy{opts.mode, std::nullopt};
  if (opts.mode == JumperMode::automatic) policy = resolve_jumper_style(crossings);
  JumperBuild jb = build_jumpers(crossings, policy, pruned);
  r.diagnostics.insert(r.diagnostics.end(), jb.diagnostics.begin(), jb.diagnostics.end());

  std::vector<BBox> erase = device_boxes;
  for (const auto& j : jb.jumpers) erase.push_back(j.bbox);
  const BinaryImage erased = erase_boxes(pruned, erase);
  const LabelMap labels = label_components(erased);

  std::map<std::string, int> counters;
  std::vector<TrackedDevice> tracked;
  for (const auto& d : dets) {
    const std::string prefix = id_prefix(d.label);
    const std::string id = prefix + std::to_string(++counters[prefix]);
    const auto points = find_port_points(pruned, d.bbox);
    auto ar = assign_ports(id, d, points);
    if (ar.diagnostic) r.diagnostics.push_back(*ar.diagnostic);
    tracked.push_back({id, d.label, std::move(ar.ports), std::move(ar.unbound)});
  }
  for (auto& j : jb.jumpers) {
    for (auto& p : j.ports) p.net_label = labels.at(p.location.x, p.location.y);
  }
  const Netlist provisional = track_nets(labels, tracked, &r.diagnostics);
  r.netlist = post_process(provisional, jb.jumpers);

  if (opts.keep_stages) {
    r.stages.emplace_back("1_binary", to_gray(bin.image));
    r.stages.emplace_back("2_skeleton", to_gray(skeleton));
    r.stages.emplace_back("3_filled", to_gray(filled));
    r.stages.emplace_back("4_pruned", to_gray(pruned));
    r.stages.emplace_back("5_erased", to_gray(erased));
  }
  return r;
}

ConvertResult convert(const GrayImage& image, const Detector& detector, const ConvertOptions& opts) {
  auto devices = detector.detect_devices(image);
  for (auto& d : devices) {
    if ((needs_orientation(d.label) && !d.orientation) || (needs_mirror(d.label) && !d.mirror)) {
      const auto guess = detector.classify(image, d.bbox, d.label);
      if (!d.orientation) d.orientation = guess.orientation;
      if (needs_mirror(d.label) && !d.mirror) d.mirror = guess.mirror;
    }
  }
  const auto crossings = detector.detect_crossings(image);
  return convert(image, devices, crossings, opts);
}

ConvertResult convert(std::span<const std::uint8_t> png_bytes, std::span<const DeviceDetection> devices,
                      std::span<const CrossingDetection> crossings, const ConvertOptions& opts) {
  return convert(decode_png(png_bytes), devices, crossings, opts);
}

}  // namespace netscan
