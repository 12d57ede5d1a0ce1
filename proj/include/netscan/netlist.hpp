#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netscan {

// Device taxonomy. Annotation labels are the 22 classes a detector emits;
// several labels share one netlist type (resistor_1 and resistor_2 are both
// a Resistor).
enum class DeviceLabel : std::uint8_t {
  nmos,
  nmos_cross,
  nmos_bulk,
  pmos,
  pmos_cross,
  pmos_bulk,
  npn,
  npn_cross,
  pnp,
  pnp_cross,
  siso_amp,
  diso_amp,
  dido_amp,
  diode,
  current,
  voltage,
  voltage_lines,
  resistor_1,
  resistor_2,
  capacitor,
  inductor,
  gnd,
};

inline constexpr int kDeviceLabelCount = 22;

enum class DeviceGroup : std::uint8_t { MOS, BJT, Amp, Diode, Source, Passive, Gnd };

struct DeviceKind {
  DeviceLabel label;
  std::string_view annotation;  // "nmos_cross"
  DeviceGroup group;
  std::string_view netlist_type;  // "NMOS"
  // Ports in canonical order. Body is listed for *_bulk kinds.
  std::vector<std::string_view> ports;
  bool is_cross = false;  // carries a temporary "Conn" port while drawing
  bool has_body = false;
};

// Name of the second gate/base lead of *_cross devices. Only intermediate
// netlists carry it.
inline constexpr std::string_view kConnPort = "Conn";
// The gnd symbol has a single terminal.
inline constexpr std::string_view kGndPin = "Pin";
inline constexpr std::string_view kGroundNet = "GND";

const DeviceKind& device_kind(DeviceLabel label);
std::span<const DeviceKind> all_device_kinds();
std::optional<DeviceLabel> parse_device_label(std::string_view text);
std::string_view to_string(DeviceLabel label);
std::string_view to_string(DeviceGroup group);

// Orientation and mirror classification is required for these groups
// (plus voltage_lines); mirror only for BJT and Amp.
bool needs_orientation(DeviceLabel label);
bool needs_mirror(DeviceLabel label);

struct PortBinding {
  std::string port;
  std::string net;

  bool operator==(const PortBinding&) const = default;
};

struct Device {
  std::string id;
  DeviceLabel label = DeviceLabel::resistor_1;
  // Ordered by the kind's canonical port order (Conn last when present).
  std::vector<PortBinding> ports;

  const std::string* net_of(std::string_view port) const;
  bool operator==(const Device&) const = default;
};

class NetlistError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Netlist {
 public:
  Netlist() = default;
  explicit Netlist(std::vector<Device> devices);

  const std::vector<Device>& devices() const { return devices_; }
  // Distinct net names in first-reference order.
  std::vector<std::string> nets() const;
  std::size_t port_count() const;
  bool empty() const { return devices_.empty(); }

  bool operator==(const Netlist&) const = default;

 private:
  std::vector<Device> devices_;
};

// Strict parse of the exchange format. Throws NetlistError on malformed
// JSON, unknown labels, port-set mismatches, empty net names and duplicate
// device ids. Net "0" is normalized to "GND".
Netlist parse_netlist(std::string_view json_text);

// Same checks as parse_netlist but applied to an in-memory device list.
Netlist make_netlist(std::vector<Device> devices, bool allow_conn = true);

std::string serialize_netlist(const Netlist& netlist);

enum class DiagnosticCode : std::uint8_t {
  duplicate_id,
  dangling_net,
  port_mismatch,
  empty_net,
  gnd_device,
  conn_port,
};

struct Diagnostic {
  DiagnosticCode code;
  std::string subject;  // device id or net name
  std::string reason;

  bool operator==(const Diagnostic&) const = default;
};

std::string_view to_string(DiagnosticCode code);

// Returns an empty list iff every invariant holds, no net is dangling and
// the netlist is final (no gnd devices, no Conn ports).
std::vector<Diagnostic> validate(const Netlist& netlist);

// Device-list view used by validate(); accepts duplicate ids.
std::vector<Diagnostic> validate_devices(std::span<const Device> devices);

}  // namespace netscan
