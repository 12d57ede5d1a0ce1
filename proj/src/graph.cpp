#include "netscan/graph.hpp"

#include <map>

namespace netscan {

int HeteroGraph::add_node(std::string id, std::string type) {
  nodes_.push_back({std::move(id), std::move(type)});
  return static_cast<int>(nodes_.size()) - 1;
}

void HeteroGraph::add_edge(int a, int b, std::string type) {
  const int n = static_cast<int>(nodes_.size());
  if (a < 0 || b < 0 || a >= n || b >= n || a == b) {
    throw GraphError("edge endpoints out of range");
  }
  edges_.push_back({a, b, std::move(type)});
}

std::string edge_type(DeviceLabel label, std::string_view port) {
  const DeviceKind& kind = device_kind(label);
  std::string prefix(kind.netlist_type);
  if (label == DeviceLabel::voltage_lines) prefix = "Voltage_lines";
  std::string name(port);
  switch (kind.group) {
    case DeviceGroup::MOS:
      if (port == "Drain" || port == "Source") name = "D_S";
      break;
    case DeviceGroup::Source:
      if (label != DeviceLabel::voltage_lines && (port == "Pos" || port == "Neg")) name = "Port";
      break;
    case DeviceGroup::Passive:
      if (port == "Pos" || port == "Neg") name = "Port";
      break;
    default:
      break;
  }
  return prefix + "_" + name;
}

HeteroGraph netlist_to_graph(const Netlist& netlist) {
  HeteroGraph g;
  std::map<std::string, int> net_node;
  std::vector<int> device_node;
  for (const auto& d : netlist.devices()) {
    if (d.label == DeviceLabel::gnd) {
      throw GraphError("gnd device " + d.id + " must be merged before graph construction");
    }
    device_node.push_back(g.add_node("dev:" + d.id, std::string(device_kind(d.label).netlist_type)));
  }
  for (const auto& net : netlist.nets()) {
    net_node.emplace(net, g.add_node("net:" + net, std::string(kNetNodeType)));
  }
  for (std::size_t i = 0; i < netlist.devices().size(); ++i) {
    const Device& d = netlist.devices()[i];
    for (const auto& b : d.ports) {
      if (b.port == kConnPort) {
        throw GraphError("device " + d.id + " still carries a Conn port");
      }
      g.add_edge(device_node[i], net_node.at(b.net), edge_type(d.label, b.port));
    }
  }
  return g;
}

}  // namespace netscan
