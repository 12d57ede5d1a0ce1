#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "netscan/netlist.hpp"

namespace netscan {

inline constexpr std::string_view kNetNodeType = "NET";

struct GraphNode {
  std::string id;
  std::string type;
};

struct GraphEdge {
  int a = 0;
  int b = 0;
  std::string type;
};

// Undirected graph with typed nodes and typed edges. Parallel edges are
// allowed (a MOS with Drain and Source on one net yields two NMOS_D_S edges
// between the same pair of nodes).
class HeteroGraph {
 public:
  int add_node(std::string id, std::string type);
  void add_edge(int a, int b, std::string type);

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

 private:
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Edge type for a bound port after collapsing indistinguishable ports:
// MOS Drain/Source -> D_S, Source and Passive Pos/Neg -> Port (voltage_lines
// keeps Pos/Neg).
std::string edge_type(DeviceLabel label, std::string_view port);

// One node per device and per net, one edge per bound port. Throws
// GraphError on gnd devices or Conn ports.
HeteroGraph netlist_to_graph(const Netlist& netlist);

enum class EditKind : std::uint8_t { insert, remove, substitute };
enum class EditTarget : std::uint8_t { node, edge };

struct EditOp {
  EditKind kind;
  EditTarget target;
  std::string detail;
};

struct GedOptions {
  std::chrono::milliseconds budget{60'000};
  // 0 = unlimited. A deterministic alternative to the wall-clock budget.
  std::uint64_t max_expansions = 0;
  bool collect_edit_ops = false;
};

struct GedResult {
  int cost = 0;
  bool optimal = false;
  std::chrono::nanoseconds elapsed{0};
  std::uint64_t expansions = 0;
  // Operations turning the first graph into the second.
  std::vector<EditOp> edit_ops;
};

// Uniform-cost graph edit distance. Depth-first branch and bound over node
// assignments; returns the best cost found and whether the search proved it
// minimal before the budget ran out.
GedResult ged(const HeteroGraph& g1, const HeteroGraph& g2, const GedOptions& options = {});

inline constexpr std::size_t kBruteForceNodeLimit = 24;

// Exhaustive reference solver. Enumerates every partial node mapping with
// insert/delete completions, pruning only on accumulated cost. Throws
// GraphError when the two graphs together exceed kBruteForceNodeLimit nodes.
int ged_bruteforce(const HeteroGraph& g1, const HeteroGraph& g2);

}  // namespace netscan
