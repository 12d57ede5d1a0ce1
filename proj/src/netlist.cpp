#include "netscan/netlist.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <unordered_set>

#include "json.hpp"

namespace netscan {

namespace {

using G = DeviceGroup;
using L = DeviceLabel;

const std::vector<DeviceKind>& kind_table() {
  static const std::vector<DeviceKind> table = [] {
    const std::vector<std::string_view> mos{"Gate", "Drain", "Source"};
    const std::vector<std::string_view> mos_bulk{"Gate", "Drain", "Source", "Body"};
    const std::vector<std::string_view> bjt{"Base", "Collector", "Emitter"};
    const std::vector<std::string_view> two{"Pos", "Neg"};
    std::vector<DeviceKind> t{
        {L::nmos, "nmos", G::MOS, "NMOS", mos},
        {L::nmos_cross, "nmos_cross", G::MOS, "NMOS", mos, true},
        {L::nmos_bulk, "nmos_bulk", G::MOS, "NMOS", mos_bulk, false, true},
        {L::pmos, "pmos", G::MOS, "PMOS", mos},
        {L::pmos_cross, "pmos_cross", G::MOS, "PMOS", mos, true},
        {L::pmos_bulk, "pmos_bulk", G::MOS, "PMOS", mos_bulk, false, true},
        {L::npn, "npn", G::BJT, "NPN", bjt},
        {L::npn_cross, "npn_cross", G::BJT, "NPN", bjt, true},
        {L::pnp, "pnp", G::BJT, "PNP", bjt},
        {L::pnp_cross, "pnp_cross", G::BJT, "PNP", bjt, true},
        {L::siso_amp, "siso_amp", G::Amp, "SISO_Amp", {"In", "Out"}},
        {L::diso_amp, "diso_amp", G::Amp, "DISO_Amp", {"InP", "InN", "Out"}},
        {L::dido_amp, "dido_amp", G::Amp, "DIDO_Amp", {"InP", "InN", "OutP", "OutN"}},
        {L::diode, "diode", G::Diode, "Diode", two},
        {L::current, "current", G::Source, "Current", two},
        {L::voltage, "voltage", G::Source, "Voltage", two},
        {L::voltage_lines, "voltage_lines", G::Source, "Voltage", two},
        {L::resistor_1, "resistor_1", G::Passive, "Resistor", two},
        {L::resistor_2, "resistor_2", G::Passive, "Resistor", two},
        {L::capacitor, "capacitor", G::Passive, "Capacitor", two},
        {L::inductor, "inductor", G::Passive, "Inductor", two},
        {L::gnd, "gnd", G::Gnd, "Gnd", {kGndPin}},
    };
    return t;
  }();
  return table;
}

std::string normalize_net(std::string name) {
  if (name == "0") return std::string(kGroundNet);
  return name;
}

// Position of `port` in the kind's canonical order; Conn sorts last.
int port_rank(const DeviceKind& kind, std::string_view port) {
  for (std::size_t i = 0; i < kind.ports.size(); ++i) {
    if (kind.ports[i] == port) return static_cast<int>(i);
  }
  if (kind.is_cross && port == kConnPort) return static_cast<int>(kind.ports.size());
  return -1;
}

void check_device(const Device& d, bool allow_conn) {
  const DeviceKind& kind = device_kind(d.label);
  std::set<std::string_view> seen;
  for (const auto& b : d.ports) {
    const int rank = port_rank(kind, b.port);
    if (rank < 0 || (b.port == kConnPort && !allow_conn)) {
      throw NetlistError("device " + d.id + ": port " + b.port + " is not valid for " +
                         std::string(kind.annotation));
    }
    if (!seen.insert(b.port).second) {
      throw NetlistError("device " + d.id + ": port " + b.port + " bound twice");
    }
    if (b.net.empty()) {
      throw NetlistError("device " + d.id + ": port " + b.port + " has an empty net name");
    }
  }
  for (auto p : kind.ports) {
    if (!seen.contains(p) && !(kind.has_body && p == "Body")) {
      throw NetlistError("device " + d.id + ": missing port " + std::string(p));
    }
  }
}

}  // namespace

const DeviceKind& device_kind(DeviceLabel label) {
  return kind_table().at(static_cast<std::size_t>(label));
}

std::span<const DeviceKind> all_device_kinds() { return kind_table(); }

std::optional<DeviceLabel> parse_device_label(std::string_view text) {
  for (const auto& k : kind_table()) {
    if (k.annotation == text) return k.label;
  }
  return std::nullopt;
}

std::string_view to_string(DeviceLabel label) { return device_kind(label).annotation; }

std::string_view to_string(DeviceGroup group) {
  static constexpr std::array<std::string_view, 7> names{"MOS",    "BJT",     "Amp", "Diode",
                                                         "Source", "Passive", "Gnd"};
  return names.at(static_cast<std::size_t>(group));
}

bool needs_orientation(DeviceLabel label) {
  switch (device_kind(label).group) {
    case G::MOS:
    case G::BJT:
    case G::Amp:
    case G::Diode:
      return true;
    default:
      return label == L::voltage_lines;
  }
}

bool needs_mirror(DeviceLabel label) {
  const auto g = device_kind(label).group;
  return g == G::BJT || g == G::Amp;
}

const std::string* Device::net_of(std::string_view port) const {
  for (const auto& b : ports) {
    if (b.port == port) return &b.net;
  }
  return nullptr;
}

Netlist::Netlist(std::vector<Device> devices) : devices_(std::move(devices)) {}

std::vector<std::string> Netlist::nets() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& d : devices_) {
    for (const auto& b : d.ports) {
      if (seen.insert(b.net).second) out.push_back(b.net);
    }
  }
  return out;
}

std::size_t Netlist::port_count() const {
  std::size_t n = 0;
  for (const auto& d : devices_) n += d.ports.size();
  return n;
}

Netlist make_netlist(std::vector<Device> devices, bool allow_conn) {
  std::unordered_set<std::string> ids;
  for (auto& d : devices) {
    if (d.id.empty()) throw NetlistError("device with empty id");
    if (!ids.insert(d.id).second) throw NetlistError("duplicate device id " + d.id);
    for (auto& b : d.ports) b.net = normalize_net(std::move(b.net));
    check_device(d, allow_conn);
    const DeviceKind& kind = device_kind(d.label);
    std::stable_sort(d.ports.begin(), d.ports.end(), [&](const auto& a, const auto& b) {
      return port_rank(kind, a.port) < port_rank(kind, b.port);
    });
  }
  return Netlist(std::move(devices));
}

Netlist parse_netlist(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw NetlistError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("devices") || !doc["devices"].is_array()) {
    throw NetlistError("netlist document needs a top-level \"devices\" array");
  }
  std::vector<Device> devices;
  std::size_t index = 0;
  for (const auto& jd : doc["devices"]) {
    const std::string where = "device #" + std::to_string(index++);
    if (!jd.is_object()) throw NetlistError(where + " is not an object");
    if (!jd.contains("id") || !jd["id"].is_string()) throw NetlistError(where + ": missing id");
    if (!jd.contains("type") || !jd["type"].is_string()) {
      throw NetlistError(where + ": missing type");
    }
    Device d;
    d.id = jd["id"].get<std::string>();
    const auto type = jd["type"].get<std::string>();
    const auto label = parse_device_label(type);
    if (!label) throw NetlistError(where + " (" + d.id + "): unknown device type " + type);
    d.label = *label;
    if (!jd.contains("ports") || !jd["ports"].is_object()) {
      throw NetlistError(where + " (" + d.id + "): missing ports object");
    }
    for (const auto& [port, net] : jd["ports"].items()) {
      if (!net.is_string()) throw NetlistError(d.id + ": net of port " + port + " is not a string");
      d.ports.push_back({port, net.get<std::string>()});
    }
    devices.push_back(std::move(d));
  }
  return make_netlist(std::move(devices));
}

std::string serialize_netlist(const Netlist& netlist) {
  nlohmann::ordered_json doc;
  doc["devices"] = nlohmann::ordered_json::array();
  for (const auto& d : netlist.devices()) {
    nlohmann::ordered_json jd;
    jd["id"] = d.id;
    jd["type"] = std::string(to_string(d.label));
    nlohmann::ordered_json ports = nlohmann::ordered_json::object();
    for (const auto& b : d.ports) ports[b.port] = b.net;
    jd["ports"] = std::move(ports);
    doc["devices"].push_back(std::move(jd));
  }
  return doc.dump();
}

std::string_view to_string(DiagnosticCode code) {
  switch (code) {
    case DiagnosticCode::duplicate_id: return "duplicate-id";
    case DiagnosticCode::dangling_net: return "dangling-net";
    case DiagnosticCode::port_mismatch: return "port-mismatch";
    case DiagnosticCode::empty_net: return "empty-net";
    case DiagnosticCode::gnd_device: return "gnd-device";
    case DiagnosticCode::conn_port: return "conn-port";
  }
  return "unknown";
}

std::vector<Diagnostic> validate_devices(std::span<const Device> devices) {
  std::vector<Diagnostic> out;
  std::map<std::string, int> id_count;
  std::map<std::string, int> net_uses;
  std::vector<std::string> net_order;
  for (const auto& d : devices) {
    if (++id_count[d.id] == 2) {
      out.push_back({DiagnosticCode::duplicate_id, d.id, "device id used more than once"});
    }
    const DeviceKind& kind = device_kind(d.label);
    if (d.label == L::gnd) {
      out.push_back({DiagnosticCode::gnd_device, d.id, "gnd symbol left in netlist"});
    }
    std::set<std::string_view> bound;
    for (const auto& b : d.ports) {
      bound.insert(b.port);
      if (b.port == kConnPort && kind.is_cross) {
        out.push_back({DiagnosticCode::conn_port, d.id, "temporary Conn port left in netlist"});
      } else if (port_rank(kind, b.port) < 0) {
        out.push_back({DiagnosticCode::port_mismatch, d.id, "unexpected port " + b.port});
      }
      if (b.net.empty()) {
        out.push_back({DiagnosticCode::empty_net, d.id, "port " + b.port + " has no net"});
        continue;
      }
      if (net_uses[b.net]++ == 0) net_order.push_back(b.net);
    }
    for (auto p : kind.ports) {
      if (!bound.contains(p) && !(kind.has_body && p == "Body")) {
        out.push_back({DiagnosticCode::port_mismatch, d.id, "missing port " + std::string(p)});
      }
    }
  }
  for (const auto& net : net_order) {
    if (net_uses[net] == 1) {
      out.push_back({DiagnosticCode::dangling_net, net, "net referenced by a single port"});
    }
  }
  return out;
}

std::vector<Diagnostic> validate(const Netlist& netlist) {
  return validate_devices(netlist.devices());
}

}  // namespace netscan
