#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "netscan/graph.hpp"
#include "netscan/netlist.hpp"

namespace netscan::testing {

// Three NMOS, two PMOS and a resistor over nets Vb, GND, P and X.
inline Netlist fig2_circuit() {
  return make_netlist({
      {"M1", DeviceLabel::nmos, {{"Gate", "Vb"}, {"Drain", "Vb"}, {"Source", "GND"}}},
      {"M2", DeviceLabel::nmos, {{"Gate", "Vb"}, {"Drain", "X"}, {"Source", "GND"}}},
      {"M3", DeviceLabel::pmos, {{"Gate", "X"}, {"Drain", "X"}, {"Source", "P"}}},
      {"M4", DeviceLabel::pmos, {{"Gate", "X"}, {"Drain", "Vb"}, {"Source", "P"}}},
      {"M5", DeviceLabel::nmos, {{"Gate", "Vb"}, {"Drain", "P"}, {"Source", "GND"}}},
      {"R1", DeviceLabel::resistor_1, {{"Pos", "P"}, {"Neg", "GND"}}},
  });
}

// Same circuit with M5 recognized as PMOS and its drain wired to a stray net E.
inline Netlist fig2_erroneous() {
  return make_netlist({
      {"M1", DeviceLabel::nmos, {{"Gate", "Vb"}, {"Drain", "Vb"}, {"Source", "GND"}}},
      {"M2", DeviceLabel::nmos, {{"Gate", "Vb"}, {"Drain", "X"}, {"Source", "GND"}}},
      {"M3", DeviceLabel::pmos, {{"Gate", "X"}, {"Drain", "X"}, {"Source", "P"}}},
      {"M4", DeviceLabel::pmos, {{"Gate", "X"}, {"Drain", "Vb"}, {"Source", "P"}}},
      {"M5", DeviceLabel::pmos, {{"Gate", "Vb"}, {"Drain", "E"}, {"Source", "GND"}}},
      {"R1", DeviceLabel::resistor_1, {{"Pos", "P"}, {"Neg", "GND"}}},
  });
}

// Small random typed multigraph; not necessarily bipartite.
inline HeteroGraph random_graph(std::mt19937_64& rng, int max_nodes, int max_edges) {
  static const char* kNodeTypes[] = {"NMOS", "PMOS", "NET"};
  static const char* kEdgeTypes[] = {"NMOS_Gate", "NMOS_D_S", "PMOS_Gate"};
  HeteroGraph g;
  const int n = std::uniform_int_distribution<int>(0, max_nodes)(rng);
  for (int i = 0; i < n; ++i) {
    g.add_node("v" + std::to_string(i), kNodeTypes[std::uniform_int_distribution<int>(0, 2)(rng)]);
  }
  if (n >= 2) {
    const int m = std::uniform_int_distribution<int>(0, max_edges)(rng);
    for (int i = 0; i < m; ++i) {
      const int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
      int b = std::uniform_int_distribution<int>(0, n - 2)(rng);
      if (b >= a) ++b;
      g.add_edge(a, b, kEdgeTypes[std::uniform_int_distribution<int>(0, 2)(rng)]);
    }
  }
  return g;
}

// Random final netlist: every net has at least two ports.
inline Netlist random_netlist(std::mt19937_64& rng, int devices) {
  std::vector<Device> out;
  std::vector<std::string> nets{"GND"};
  std::uniform_int_distribution<int> pick_kind(0, kDeviceLabelCount - 2);  // no gnd
  for (int i = 0; i < devices; ++i) {
    Device d;
    d.label = static_cast<DeviceLabel>(pick_kind(rng));
    d.id = "D" + std::to_string(i);
    for (auto p : device_kind(d.label).ports) {
      std::string net;
      if (std::bernoulli_distribution(0.4)(rng)) {
        net = "n" + std::to_string(nets.size());
        nets.push_back(net);
      } else {
        net = nets[std::uniform_int_distribution<std::size_t>(0, nets.size() - 1)(rng)];
      }
      d.ports.push_back({std::string(p), net});
    }
    out.push_back(std::move(d));
  }
  // Fold single-use nets into GND so nothing dangles.
  std::map<std::string, int> uses;
  for (const auto& d : out) {
    for (const auto& b : d.ports) ++uses[b.net];
  }
  for (auto& d : out) {
    for (auto& b : d.ports) {
      if (uses[b.net] == 1) b.net = "GND";
    }
  }
  int gnd_uses = 0;
  for (const auto& d : out) {
    for (const auto& b : d.ports) gnd_uses += b.net == "GND";
  }
  if (gnd_uses == 1) {
    // Re-home the lone GND binding onto a net that is already shared.
    for (auto& d : out) {
      for (auto& b : d.ports) {
        if (b.net == "GND") b.net = out.front().ports.front().net == "GND"
                                        ? out.front().ports.back().net
                                        : out.front().ports.front().net;
      }
    }
  }
  return make_netlist(std::move(out));
}

}  // namespace netscan::testing
