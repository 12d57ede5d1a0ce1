#include "netscan/synth.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <variant>

#include "json.hpp"
#include "netscan/symbols.hpp"

namespace netscan {

std::string_view to_string(CrossingRegime r) {
  switch (r) {
    case CrossingRegime::bridge_dominant:
      return "bridge_dominant";
    case CrossingRegime::dot_flat:
      return "dot_flat";
    case CrossingRegime::dot_only:
      return "dot_only";
  }
  return "bridge_dominant";
}

std::optional<CrossingRegime> parse_crossing_regime(std::string_view text) {
  for (auto r : {CrossingRegime::bridge_dominant, CrossingRegime::dot_flat, CrossingRegime::dot_only}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

// Distribution objects differ between standard libraries; plain modulo
// keeps corpora identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  int below(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }
  int between(int lo, int hi) { return lo + below(hi - lo + 1); }
  bool chance(int percent) { return below(100) < percent; }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) std::swap(v[i], v[below(i + 1)]);
  }

 private:
  std::mt19937_64 engine_;
};

std::string id_prefix(DeviceLabel label) {
  switch (device_kind(label).group) {
    case DeviceGroup::MOS:
      return "M";
    case DeviceGroup::BJT:
      return "Q";
    case DeviceGroup::Amp:
      return "U";
    case DeviceGroup::Diode:
      return "D";
    case DeviceGroup::Source:
      return label == DeviceLabel::current ? "I" : "V";
    case DeviceGroup::Passive:
      return label == DeviceLabel::capacitor ? "C" : label == DeviceLabel::inductor ? "L" : "R";
    case DeviceGroup::Gnd:
      return "G";
  }
  return "X";
}

}  // namespace

Netlist generate_circuit(std::uint64_t seed, int min_devices, int max_devices, CircuitShape shape) {
  if (min_devices < 2 || max_devices > 40 || min_devices > max_devices) {
    throw std::invalid_argument("device range must lie within [2, 40]");
  }
  Rng rng(mix_seed(seed, 0xC1C));
  const int n = rng.between(min_devices, max_devices);
  std::vector<DeviceLabel> labels(n);
  for (auto& l : labels) l = static_cast<DeviceLabel>(rng.below(kDeviceLabelCount - 1));

  std::vector<std::vector<int>> net_of(n);  // -1 = unassigned
  std::vector<std::vector<std::pair<int, int>>> nets;
  for (int d = 0; d < n; ++d) net_of[d].assign(device_kind(labels[d]).ports.size(), -1);
  auto attach = [&](int d, int p, int net) {
    net_of[d][p] = net;
    nets[net].emplace_back(d, p);
  };
  auto on_net = [&](int d, int net) {
    return std::any_of(nets[net].begin(), nets[net].end(), [&](auto t) { return t.first == d; });
  };

  // Spanning step keeps the circuit connected; each device joins one net.
  for (int d = 1; d < n; ++d) {
    const int p = rng.below(static_cast<int>(net_of[d].size()));
    const int e = rng.below(d);
    const int q = rng.below(static_cast<int>(net_of[e].size()));
    if (net_of[e][q] < 0) {
      nets.emplace_back();
      attach(e, q, static_cast<int>(nets.size()) - 1);
    }
    attach(d, p, net_of[e][q]);
  }
  std::vector<std::pair<int, int>> rest;
  for (int d = 0; d < n; ++d) {
    for (int p = 0; p < static_cast<int>(net_of[d].size()); ++p) {
      if (net_of[d][p] < 0) rest.emplace_back(d, p);
    }
  }
  rng.shuffle(rest);
  int ground = -1;
  if (shape == CircuitShape::tree) {
    // Every spare port goes to ground, so the non-ground nets stay acyclic.
    if (rest.size() < 2) {
      ground = 0;
    } else {
      nets.emplace_back();
      ground = static_cast<int>(nets.size()) - 1;
    }
    for (auto [d, p] : rest) attach(d, p, ground);
  } else {
    for (auto [d, p] : rest) {
      if (!nets.empty() && rng.chance(45)) {
        int pick = rng.below(static_cast<int>(nets.size()));
        for (int tries = 0; tries < 3 && on_net(d, pick); ++tries) pick = rng.below(static_cast<int>(nets.size()));
        attach(d, p, pick);
      } else {
        nets.emplace_back();
        attach(d, p, static_cast<int>(nets.size()) - 1);
      }
    }
  }
  // Fold single-terminal nets into others.
  for (int k = 0; k < static_cast<int>(nets.size()); ++k) {
    if (nets[k].size() != 1) continue;
    const auto [d, p] = nets[k].front();
    std::vector<int> targets;
    for (int j = 0; j < static_cast<int>(nets.size()); ++j) {
      if (j != k && nets[j].size() >= 1 && !on_net(d, j)) targets.push_back(j);
    }
    if (targets.empty()) {
      for (int j = 0; j < static_cast<int>(nets.size()); ++j) {
        if (j != k && !nets[j].empty()) targets.push_back(j);
      }
    }
    const int to = targets[rng.below(static_cast<int>(targets.size()))];
    nets[k].clear();
    attach(d, p, to);
  }
  std::vector<int> live;
  for (int k = 0; k < static_cast<int>(nets.size()); ++k) {
    if (!nets[k].empty()) live.push_back(k);
  }
  if (ground < 0 || nets[ground].empty()) ground = live[rng.below(static_cast<int>(live.size()))];
  std::map<int, std::string> names;
  int counter = 0;
  for (int k : live) names[k] = k == ground ? std::string(kGroundNet) : "N" + std::to_string(++counter);

  std::map<std::string, int> ids;
  std::vector<Device> devices;
  for (int d = 0; d < n; ++d) {
    Device dev;
    const std::string prefix = id_prefix(labels[d]);
    dev.id = prefix + std::to_string(++ids[prefix]);
    dev.label = labels[d];
    const auto& ports = device_kind(labels[d]).ports;
    for (std::size_t p = 0; p < ports.size(); ++p) dev.ports.push_back({std::string(ports[p]), names[net_of[d][p]]});
    devices.push_back(std::move(dev));
  }
  return make_netlist(std::move(devices), false);
}

namespace {

constexpr std::array<int, 4> kDx{0, 1, 0, -1};  // N E S W
constexpr std::array<int, 4> kDy{-1, 0, 1, 0};
constexpr int kPassOverCost = 10;
constexpr int kJoinCost = 2;
constexpr int kMaxAttempts = 8;
constexpr int kCircuitRetries = 12;
constexpr int kRerouteRounds = 12;

int opposite(int d) { return (d + 2) % 4; }
int side_dir(Side s) { return static_cast<int>(s); }  // top=N, right=E, bottom=S, left=W

struct Symbol {
  int device = -1;  // index into golden devices, -1 for a gnd symbol
  DeviceLabel label = DeviceLabel::gnd;
  Orientation orientation = Orientation::u;
  bool mirror = false;
  int fx = 0, fy = 0;  // lattice origin of the 3x3 footprint
};

struct Terminal {
  int symbol = 0;
  TerminalSlot slot;  // transformed
  int ax = 0, ay = 0;  // access cell
  int net = -1;        // routing net, -1 for a stub
};

struct Cell {
  bool blocked = false;
  int access = -1;  // terminal index
  int net = -1;
  std::uint8_t arms = 0;
  int net2 = -1;  // net passing over
  std::uint8_t arms2 = 0;
};

class Grid {
 public:
  Grid(int w, int h) : w_(w), h_(h), cells_(static_cast<std::size_t>(w) * h) {}
  int width() const { return w_; }
  int height() const { return h_; }
  bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < w_ && y < h_; }
  Cell& at(int x, int y) { return cells_[static_cast<std::size_t>(y) * w_ + x]; }
  const Cell& at(int x, int y) const { return cells_[static_cast<std::size_t>(y) * w_ + x]; }
  int index(int x, int y) const { return y * w_ + x; }

 private:
  int w_, h_;
  std::vector<Cell> cells_;
};

struct Layout {
  std::vector<Symbol> symbols;
  std::vector<Terminal> terminals;
  std::vector<std::vector<int>> nets;  // routing nets as terminal lists
  int grid_w = 0, grid_h = 0;
};

// Plans symbols on a cell grid, groups GND pins under gnd symbols and
// decides which Conn leads join their gate net.
std::optional<Layout> plan(const Netlist& n, CrossingRegime regime, int cell, Rng& rng) {
  const auto& devs = n.devices();
  const int nd = static_cast<int>(devs.size());
  int gnd_pins = 0;
  for (const auto& d : devs) {
    for (const auto& b : d.ports) gnd_pins += b.net == kGroundNet;
  }
  const int expected = nd + (regime == CrossingRegime::dot_only ? gnd_pins : (gnd_pins + 1) / 2);
  const int cells_needed = expected * 17 / 10 + 2;
  const int cols = std::max(2, static_cast<int>(std::ceil(std::sqrt(cells_needed * 1.3))));
  const int rows = (cells_needed + cols - 1) / cols + 1;

  Layout L;
  L.grid_w = cols * cell + 2;
  L.grid_h = rows * cell + 2;
  std::vector<int> owner(cols * rows, -1);
  const int off = 1 + (cell - 3) / 2;
  auto cell_center = [&](int c) { return std::pair<int, int>{c % cols, c / cols}; };

  // Devices sharing a net are pulled together.
  std::vector<std::set<std::string>> dev_nets(nd);
  for (int d = 0; d < nd; ++d) {
    for (const auto& b : devs[d].ports) {
      if (b.net != kGroundNet) dev_nets[d].insert(b.net);
    }
  }
  std::vector<int> order;
  std::vector<bool> queued(nd, false);
  for (int start = 0; start < nd; ++start) {
    if (queued[start]) continue;
    std::queue<int> q;
    q.push(start);
    queued[start] = true;
    while (!q.empty()) {
      const int d = q.front();
      q.pop();
      order.push_back(d);
      for (int e = 0; e < nd; ++e) {
        if (queued[e]) continue;
        for (const auto& net : dev_nets[d]) {
          if (dev_nets[e].count(net)) {
            queued[e] = true;
            q.push(e);
            break;
          }
        }
      }
    }
  }
  std::vector<int> dev_cell(nd, -1);
  for (int d : order) {
    long best_score = -1;
    int best = -1;
    for (int c = 0; c < cols * rows; ++c) {
      if (owner[c] != -1) continue;
      const auto [cx, cy] = cell_center(c);
      long score = 0;
      bool linked = false;
      for (int e = 0; e < nd; ++e) {
        if (dev_cell[e] < 0) continue;
        bool share = false;
        for (const auto& net : dev_nets[d]) share |= dev_nets[e].count(net) > 0;
        if (!share) continue;
        linked = true;
        const auto [ex, ey] = cell_center(dev_cell[e]);
        score += std::abs(cx - ex) + std::abs(cy - ey);
      }
      if (!linked) score = std::abs(2 * cx - cols) + std::abs(2 * cy - rows);
      score = score * 8 + rng.below(8);
      if (best < 0 || score < best_score) {
        best_score = score;
        best = c;
      }
    }
    if (best < 0) return std::nullopt;
    owner[best] = d;
    dev_cell[d] = best;
  }

  // Turns a symbol so each terminal faces the devices on its net. Crossing-free
  // layouts rarely exist otherwise.
  auto orient_towards = [&](Symbol& s, int device) {
    std::vector<std::pair<double, double>> target;
    for (const auto& slot : terminal_template(s.label, true)) {
      const std::string* net = devs[device].net_of(slot.port);
      double tx = 0, ty = 0;
      int k = 0;
      if (net && *net != kGroundNet) {
        for (int e = 0; e < nd; ++e) {
          if (e == device || std::none_of(devs[e].ports.begin(), devs[e].ports.end(),
                                          [&](const auto& b) { return b.net == *net; })) {
            continue;
          }
          const auto [ex, ey] = cell_center(dev_cell[e]);
          tx += ex * cell + off + 1;
          ty += ey * cell + off + 1;
          ++k;
        }
      }
      target.emplace_back(k ? tx / k : -1, k ? ty / k : -1);
    }
    const int orientations = needs_orientation(s.label) ? 4 : 2;
    const int mirrors = needs_mirror(s.label) ? 2 : 1;
    double best = -1;
    const Symbol base = s;
    for (int o = 0; o < orientations; ++o) {
      for (int m = 0; m < mirrors; ++m) {
        const auto orient = static_cast<Orientation>(o);
        double cost = rng.below(4) * 0.1;
        int k = 0;
        for (const auto& slot : terminal_template(s.label, true)) {
          const auto [tx, ty] = target[k++];
          if (tx < 0) continue;
          const TerminalSlot t = transform(slot, orient, m == 1);
          const int dir = side_dir(t.side);
          cost += std::abs(base.fx + t.i + kDx[dir] - tx) + std::abs(base.fy + t.j + kDy[dir] - ty);
        }
        if (best < 0 || cost < best) {
          best = cost;
          s.orientation = orient;
          s.mirror = m == 1;
        }
      }
    }
  };
  auto make_symbol = [&](int device, DeviceLabel label, int c) {
    Symbol s;
    s.device = device;
    s.label = label;
    const auto [cx, cy] = cell_center(c);
    s.fx = cx * cell + off;
    s.fy = cy * cell + off;
    if (needs_orientation(label)) {
      s.orientation = static_cast<Orientation>(rng.below(4));
      s.mirror = needs_mirror(label) && rng.chance(50);
    } else if (label != DeviceLabel::gnd) {
      s.orientation = rng.chance(50) ? Orientation::u : Orientation::r;
    }
    if (regime == CrossingRegime::dot_only && device >= 0) orient_towards(s, device);
    L.symbols.push_back(s);
    return static_cast<int>(L.symbols.size()) - 1;
  };
  for (int d = 0; d < nd; ++d) make_symbol(d, devs[d].label, dev_cell[d]);

  // Terminals of devices.
  std::map<std::string, int> net_index;
  std::vector<std::pair<int, int>> ground;  // (terminal, device cell)
  auto add_terminal = [&](int sym, TerminalSlot slot) {
    const Symbol& s = L.symbols[sym];
    Terminal t;
    t.symbol = sym;
    t.slot = transform(slot, s.orientation, s.mirror);
    const int dir = side_dir(t.slot.side);
    t.ax = s.fx + t.slot.i + kDx[dir];
    t.ay = s.fy + t.slot.j + kDy[dir];
    L.terminals.push_back(t);
    return static_cast<int>(L.terminals.size()) - 1;
  };
  std::vector<std::pair<int, int>> conn_terms;  // (Conn terminal, gate terminal)
  for (int d = 0; d < nd; ++d) {
    int gate = -1;
    for (const auto& slot : terminal_template(devs[d].label, true)) {
      const int t = add_terminal(d, slot);
      if (gate < 0) gate = t;
      if (slot.port == kConnPort) {
        conn_terms.emplace_back(t, gate);
        continue;
      }
      const std::string* net = devs[d].net_of(slot.port);
      if (!net) throw RenderError("device " + devs[d].id + " lacks port " + std::string(slot.port));
      if (*net == kGroundNet) {
        ground.emplace_back(t, dev_cell[d]);
        continue;
      }
      auto [it, inserted] = net_index.try_emplace(*net, static_cast<int>(L.nets.size()));
      if (inserted) L.nets.emplace_back();
      L.terminals[t].net = it->second;
      L.nets[it->second].push_back(t);
    }
  }

  // GND pins split into spatially close groups, each with its own symbol.
  std::vector<std::vector<int>> groups;
  {
    std::vector<std::pair<int, int>> pending = ground;
    rng.shuffle(pending);
    bool first = true;
    while (!pending.empty()) {
      int size = regime == CrossingRegime::dot_only ? 1 : rng.between(1, 3);
      if (regime == CrossingRegime::dot_flat && first) size = std::max(size, 2);
      first = false;
      const auto seed = pending.front();
      const auto [sx, sy] = cell_center(seed.second);
      std::stable_sort(pending.begin() + 1, pending.end(), [&](auto a, auto b) {
        const auto [ax, ay] = cell_center(a.second);
        const auto [bx, by] = cell_center(b.second);
        return std::abs(ax - sx) + std::abs(ay - sy) < std::abs(bx - sx) + std::abs(by - sy);
      });
      size = std::min<int>(size, static_cast<int>(pending.size()));
      std::vector<int> g;
      for (int k = 0; k < size; ++k) g.push_back(pending[k].first);
      pending.erase(pending.begin(), pending.begin() + size);
      groups.push_back(std::move(g));
    }
  }
  for (const auto& g : groups) {
    double mx = 0, my = 0;
    for (int t : g) {
      mx += L.terminals[t].ax;
      my += L.terminals[t].ay;
    }
    mx /= static_cast<double>(g.size());
    my /= static_cast<double>(g.size());
    int best = -1;
    double best_d = 0;
    for (int c = 0; c < cols * rows; ++c) {
      if (owner[c] != -1) continue;
      const auto [cx, cy] = cell_center(c);
      const double px = cx * cell + off + 1, py = cy * cell + off - 1;
      const double dd = std::abs(px - mx) + std::abs(py - my) + rng.below(4) * 0.25;
      if (best < 0 || dd < best_d) {
        best_d = dd;
        best = c;
      }
    }
    if (best < 0) return std::nullopt;
    owner[best] = -2;
    const int sym = make_symbol(-1, DeviceLabel::gnd, best);
    const int pin = add_terminal(sym, terminal_template(DeviceLabel::gnd).front());
    const int net = static_cast<int>(L.nets.size());
    L.nets.emplace_back();
    L.nets[net].push_back(pin);
    L.terminals[pin].net = net;
    for (int t : g) {
      L.terminals[t].net = net;
      L.nets[net].push_back(t);
    }
  }
  // Conn leads: joined to the gate net or left as stubs.
  for (auto [conn, gate] : conn_terms) {
    if (!rng.chance(50)) continue;
    const int net = L.terminals[gate].net;
    L.terminals[conn].net = net;
    L.nets[net].push_back(conn);
  }
  return L;
}

// Routes nets in the given order. On failure reports the net that got stuck.
std::variant<Grid, int> route_in_order(const Layout& L, CrossingRegime regime, const std::vector<int>& net_order,
                                       Rng& rng) {
  Grid g(L.grid_w, L.grid_h);
  for (const auto& s : L.symbols) {
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) {
        if (!g.inside(s.fx + i, s.fy + j)) return -1;
        g.at(s.fx + i, s.fy + j).blocked = true;
      }
    }
  }
  for (int t = 0; t < static_cast<int>(L.terminals.size()); ++t) {
    const auto& term = L.terminals[t];
    if (!g.inside(term.ax, term.ay)) return -1;
    Cell& c = g.at(term.ax, term.ay);
    if (c.blocked || c.access >= 0) return -1;
    c.access = t;
    c.net = term.net >= 0 ? term.net : static_cast<int>(L.nets.size()) + t;  // stubs get private ids
    c.arms = static_cast<std::uint8_t>(1u << opposite(side_dir(term.slot.side)));
  }

  const int W = g.width(), H = g.height();
  std::vector<char> in_tree(static_cast<std::size_t>(W) * H);
  for (int net : net_order) {
    const auto& terms = L.nets[net];
    if (terms.size() < 2) continue;
    std::fill(in_tree.begin(), in_tree.end(), 0);
    std::vector<bool> done(terms.size(), false);
    const int first = rng.below(static_cast<int>(terms.size()));
    done[first] = true;
    in_tree[g.index(L.terminals[terms[first]].ax, L.terminals[terms[first]].ay)] = 1;
    std::vector<std::pair<int, int>> tree_cells{{L.terminals[terms[first]].ax, L.terminals[terms[first]].ay}};

    for (std::size_t round = 1; round < terms.size(); ++round) {
      // Next terminal: nearest to the current tree.
      int pick = -1, pick_d = 0;
      for (std::size_t k = 0; k < terms.size(); ++k) {
        if (done[k]) continue;
        const auto& t = L.terminals[terms[k]];
        int dmin = 1 << 30;
        for (auto [x, y] : tree_cells) dmin = std::min(dmin, std::abs(x - t.ax) + std::abs(y - t.ay));
        if (pick < 0 || dmin < pick_d) {
          pick = static_cast<int>(k);
          pick_d = dmin;
        }
      }
      const Terminal& src = L.terminals[terms[pick]];
      // Dijkstra over (cell, heading); heading 4 = start.
      const int S = W * H * 5;
      std::vector<int> dist(S, 1 << 30), prev(S, -1);
      using Item = std::pair<int, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      const int start = g.index(src.ax, src.ay) * 5 + 4;
      dist[start] = 0;
      pq.emplace(0, start);
      int goal = -1;
      while (!pq.empty()) {
        const auto [dcur, s] = pq.top();
        pq.pop();
        if (dcur != dist[s]) continue;
        const int ci = s / 5, head = s % 5;
        const int x = ci % W, y = ci / W;
        const Cell& c = g.at(x, y);
        if (s != start && c.net == net && in_tree[ci]) {
          goal = s;
          break;
        }
        const bool crossing_here = s != start && c.net != net && c.net >= 0;
        for (int d = 0; d < 4; ++d) {
          if (crossing_here && d != head) continue;
          if (head < 4 && d == opposite(head)) continue;
          const int nx = x + kDx[d], ny = y + kDy[d];
          if (!g.inside(nx, ny)) continue;
          const Cell& n2 = g.at(nx, ny);
          if (n2.blocked) continue;
          const int ni = g.index(nx, ny);
          int cost = 1 + (head < 4 && head != d ? 1 : 0);
          if (n2.access >= 0 && n2.net != net) continue;
          if (n2.net == net) {
            if (!in_tree[ni] || n2.net2 >= 0) continue;
            if (n2.arms & (1u << opposite(d))) continue;
            cost += std::popcount(n2.arms) == 3 ? 0 : kJoinCost;
          } else if (n2.net >= 0) {
            if (regime == CrossingRegime::dot_only || n2.net2 >= 0 || n2.access >= 0) continue;
            const std::uint8_t perpendicular = (d % 2 == 0) ? 0b1010 : 0b0101;
            if (n2.arms != perpendicular) continue;
            cost += kPassOverCost;
          } else if (n2.net2 >= 0) {
            continue;
          }
          const int ns = ni * 5 + d;
          if (dist[s] + cost < dist[ns]) {
            dist[ns] = dist[s] + cost;
            prev[ns] = s;
            pq.emplace(dist[ns], ns);
          }
        }
      }
      if (goal < 0) return net;
      std::vector<int> path;
      for (int s = goal; s >= 0; s = prev[s]) path.push_back(s);
      std::reverse(path.begin(), path.end());
      std::set<int> seen;
      for (int s : path) {
        if (!seen.insert(s / 5).second) return net;
      }
      for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const int a = path[k] / 5, b = path[k + 1] / 5, d = path[k + 1] % 5;
        Cell& ca = g.at(a % W, a / W);
        Cell& cb = g.at(b % W, b / W);
        auto mark = [&](Cell& c, int dir) {
          if (c.net == net) {
            c.arms |= static_cast<std::uint8_t>(1u << dir);
          } else if (c.net < 0) {
            c.net = net;
            c.arms = static_cast<std::uint8_t>(1u << dir);
          } else {
            c.net2 = net;
            c.arms2 |= static_cast<std::uint8_t>(1u << dir);
          }
        };
        mark(ca, d);
        mark(cb, opposite(d));
        if (ca.net == net && !in_tree[a]) {
          in_tree[a] = 1;
          tree_cells.emplace_back(a % W, a / W);
        }
      }
      done[pick] = true;
    }
  }
  return g;
}

// A net that gets stuck is moved to the front and routing starts over.
std::optional<Grid> route(const Layout& L, CrossingRegime regime, Rng& rng) {
  std::vector<int> order(L.nets.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  // Short nets first: they leave the most room for the long ones.
  std::vector<int> span(L.nets.size(), 0);
  for (std::size_t k = 0; k < L.nets.size(); ++k) {
    int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
    for (int t : L.nets[k]) {
      x0 = std::min(x0, L.terminals[t].ax);
      x1 = std::max(x1, L.terminals[t].ax);
      y0 = std::min(y0, L.terminals[t].ay);
      y1 = std::max(y1, L.terminals[t].ay);
    }
    span[k] = (x1 - x0) + (y1 - y0);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return span[a] < span[b]; });
  for (int round = 0; round < kRerouteRounds; ++round) {
    auto r = route_in_order(L, regime, order, rng);
    if (auto* g = std::get_if<Grid>(&r)) return std::move(*g);
    const int stuck = std::get<int>(r);
    if (stuck < 0) return std::nullopt;
    const auto it = std::find(order.begin(), order.end(), stuck);
    if (it == order.begin()) return std::nullopt;
    std::rotate(order.begin(), it, it + 1);
  }
  return std::nullopt;
}

// ---- drawing ----

class Canvas {
 public:
  Canvas(int w, int h, int lw) : img_(w, h, 255), lw_(lw) {}
  GrayImage& image() { return img_; }

  void dot(int x, int y) {
    const int lo = -(lw_ - 1) / 2, hi = lw_ / 2;
    for (int dy = lo; dy <= hi; ++dy) {
      for (int dx = lo; dx <= hi; ++dx) {
        if (img_.in_bounds(x + dx, y + dy)) img_(x + dx, y + dy) = 0;
      }
    }
  }
  void line(double x0, double y0, double x1, double y1) {
    const int steps = static_cast<int>(std::ceil(std::max(std::abs(x1 - x0), std::abs(y1 - y0)))) + 1;
    for (int k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      dot(static_cast<int>(std::lround(x0 + t * (x1 - x0))), static_cast<int>(std::lround(y0 + t * (y1 - y0))));
    }
  }
  void arc(double cx, double cy, double r, double a0, double a1) {
    const int steps = 64;
    double px = cx + r * std::cos(a0), py = cy + r * std::sin(a0);
    for (int k = 1; k <= steps; ++k) {
      const double a = a0 + (a1 - a0) * k / steps;
      const double qx = cx + r * std::cos(a), qy = cy + r * std::sin(a);
      line(px, py, qx, qy);
      px = qx;
      py = qy;
    }
  }
  void disc(int cx, int cy, double r) {
    const int R = static_cast<int>(std::ceil(r));
    for (int dy = -R; dy <= R; ++dy) {
      for (int dx = -R; dx <= R; ++dx) {
        if (dx * dx + dy * dy <= r * r && img_.in_bounds(cx + dx, cy + dy)) img_(cx + dx, cy + dy) = 0;
      }
    }
  }

 private:
  GrayImage img_;
  int lw_;
};

// Glyph strokes in box-local coordinates (0..40) at orientation u.
struct Glyph {
  std::vector<std::array<double, 4>> lines;
  std::vector<std::array<double, 5>> arcs;  // cx, cy, r, a0, a1
};

Glyph glyph(DeviceLabel label) {
  constexpr double pi = std::numbers::pi;
  Glyph g;
  auto poly = [&](std::initializer_list<std::array<double, 2>> pts) {
    const auto* prev = pts.begin();
    for (auto it = pts.begin() + 1; it != pts.end(); ++it) {
      g.lines.push_back({(*prev)[0], (*prev)[1], (*it)[0], (*it)[1]});
      prev = it;
    }
  };
  auto circle = [&](double cx, double cy, double r) { g.arcs.push_back({cx, cy, r, 0, 2 * pi}); };
  const DeviceKind& k = device_kind(label);
  switch (k.group) {
    case DeviceGroup::MOS:
      poly({{4, 20}, {12, 20}, {12, 12}});
      poly({{36, 20}, {28, 20}, {28, 12}});
      poly({{10, 12}, {30, 12}});
      poly({{12, 26}, {28, 26}});
      poly({{20, 26}, {20, 36}});
      if (label == DeviceLabel::pmos || label == DeviceLabel::pmos_cross || label == DeviceLabel::pmos_bulk) {
        circle(20, 30, 2.5);
      } else {
        poly({{24, 16}, {28, 20}, {24, 24}});
      }
      if (k.has_body) poly({{20, 4}, {20, 12}});
      if (k.is_cross) {
        poly({{20, 4}, {20, 7}});
        poly({{14, 7}, {26, 7}});
      }
      break;
    case DeviceGroup::BJT:
      poly({{20, 36}, {20, 26}});
      poly({{10, 26}, {30, 26}});
      poly({{4, 20}, {10, 20}, {16, 26}});
      poly({{36, 20}, {30, 20}, {24, 26}});
      if (label == DeviceLabel::npn || label == DeviceLabel::npn_cross) {
        poly({{26, 19}, {30, 20}, {29, 24}});
      } else {
        poly({{23, 21}, {24, 26}, {28, 24}});
      }
      if (k.is_cross) {
        poly({{20, 4}, {20, 12}});
        poly({{14, 12}, {26, 12}});
      }
      break;
    case DeviceGroup::Amp:
      poly({{6, 8}, {34, 8}, {20, 32}, {6, 8}});
      poly({{20, 32}, {20, 36}});
      if (label == DeviceLabel::siso_amp) {
        poly({{20, 4}, {20, 8}});
      } else {
        poly({{4, 4}, {8, 8}});
        poly({{36, 4}, {32, 8}});
        poly({{11, 12}, {15, 12}});
        poly({{13, 10}, {13, 14}});
        poly({{25, 12}, {29, 12}});
      }
      if (label == DeviceLabel::dido_amp) {
        poly({{36, 36}, {26, 22}});
        poly({{4, 36}, {14, 22}});
      }
      break;
    case DeviceGroup::Diode:
      poly({{20, 4}, {20, 12}});
      poly({{12, 12}, {28, 12}, {20, 26}, {12, 12}});
      poly({{12, 26}, {28, 26}});
      poly({{20, 26}, {20, 36}});
      break;
    case DeviceGroup::Gnd:
      poly({{20, 4}, {20, 18}});
      poly({{8, 18}, {32, 18}});
      poly({{12, 24}, {28, 24}});
      poly({{16, 30}, {24, 30}});
      break;
    case DeviceGroup::Source:
      if (label == DeviceLabel::voltage_lines) {
        poly({{20, 4}, {20, 16}});
        poly({{8, 16}, {32, 16}});
        poly({{14, 24}, {26, 24}});
        poly({{20, 24}, {20, 36}});
        break;
      }
      circle(20, 20, 12);
      poly({{20, 4}, {20, 8}});
      poly({{20, 32}, {20, 36}});
      if (label == DeviceLabel::voltage) {
        poly({{17, 14}, {23, 14}});
        poly({{20, 11}, {20, 17}});
        poly({{17, 26}, {23, 26}});
      } else {
        poly({{20, 27}, {20, 13}});
        poly({{16, 17}, {20, 13}, {24, 17}});
      }
      break;
    case DeviceGroup::Passive:
      if (label == DeviceLabel::resistor_1) {
        poly({{20, 4}, {20, 8}, {14, 11}, {26, 15}, {14, 19}, {26, 23}, {14, 27}, {20, 30}, {20, 36}});
      } else if (label == DeviceLabel::resistor_2) {
        poly({{15, 9}, {25, 9}, {25, 31}, {15, 31}, {15, 9}});
        poly({{20, 4}, {20, 9}});
        poly({{20, 31}, {20, 36}});
      } else if (label == DeviceLabel::capacitor) {
        poly({{20, 4}, {20, 17}});
        poly({{8, 17}, {32, 17}});
        poly({{8, 23}, {32, 23}});
        poly({{20, 23}, {20, 36}});
      } else {
        poly({{20, 4}, {20, 8}});
        for (int k2 = 0; k2 < 3; ++k2) g.arcs.push_back({20, 12.0 + 8 * k2, 4, -pi / 2, pi / 2});
        poly({{20, 32}, {20, 36}});
      }
      break;
  }
  return g;
}

std::array<double, 2> local_to_box(double x, double y, Orientation o, bool mirror) {
  constexpr double e = kSymbolSize - 1;
  if (mirror) x = e - x;
  for (int k = 0; k < static_cast<int>(o); ++k) {
    const double nx = e - y, ny = x;
    x = nx;
    y = ny;
  }
  return {x, y};
}

void draw_glyph(Canvas& cv, const BBox& box, DeviceLabel label, Orientation o, bool mirror) {
  const Glyph g = glyph(label);
  for (const auto& l : g.lines) {
    const auto a = local_to_box(l[0], l[1], o, mirror);
    const auto b = local_to_box(l[2], l[3], o, mirror);
    cv.line(box.x + a[0], box.y + a[1], box.x + b[0], box.y + b[1]);
  }
  for (const auto& a : g.arcs) {
    const int steps = 48;
    for (int k = 0; k < steps; ++k) {
      const double t0 = a[3] + (a[4] - a[3]) * k / steps, t1 = a[3] + (a[4] - a[3]) * (k + 1) / steps;
      const auto p = local_to_box(a[0] + a[2] * std::cos(t0), a[1] + a[2] * std::sin(t0), o, mirror);
      const auto q = local_to_box(a[0] + a[2] * std::cos(t1), a[1] + a[2] * std::sin(t1), o, mirror);
      cv.line(box.x + p[0], box.y + p[1], box.x + q[0], box.y + q[1]);
    }
  }
}

// Short strokes that look like a label; stays within +-3 px of (x, y).
// Letter-like clutter: 2-3 near-vertical strokes in separate 6 px columns,
// so strokes never touch or cross.
void draw_text_noise(Canvas& cv, int x, int y, Rng& rng) {
  const int strokes = rng.between(2, 3);
  const int left = x - 3 * (strokes - 1);
  for (int k = 0; k < strokes; ++k) {
    const int cx = left + 6 * k;
    const int lean = rng.below(2);
    const int y0 = y - rng.between(2, 5), y1 = y + rng.between(2, 5);
    if (rng.chance(50)) {
      cv.line(cx, y0, cx + lean, y1);
    } else {
      cv.line(cx + lean, y0, cx, y1);
    }
  }
}

constexpr int kCrossHalf = 6;

}  // namespace

RenderedCase render(const Netlist& netlist, const RenderStyle& style, std::uint64_t seed) {
  if (!validate(netlist).empty()) throw RenderError("render needs a valid final netlist");
  if (netlist.empty()) throw RenderError("nothing to render");
  const int lw = std::clamp(style.line_width, 1, 3);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    const int cell = 6 + attempt / 2;
    auto layout = plan(netlist, style.regime, cell, rng);
    if (!layout) continue;
    auto grid = route(*layout, style.regime, rng);
    if (!grid) continue;
    const Grid& g = *grid;

    RenderStats stats;
    stats.attempts = attempt + 1;
    std::vector<std::pair<int, int>> dots, passes;
    for (int y = 0; y < g.height(); ++y) {
      for (int x = 0; x < g.width(); ++x) {
        const Cell& c = g.at(x, y);
        if (c.net2 >= 0) {
          passes.emplace_back(x, y);
        } else if (c.net >= 0 && std::popcount(c.arms) >= 3) {
          dots.emplace_back(x, y);
          if (std::popcount(c.arms) == 4) ++stats.four_way_dots;
        }
      }
    }
    stats.dots = static_cast<int>(dots.size());
    stats.pass_overs = static_cast<int>(passes.size());
    // A flat only reads as a jumper when dots appear too.
    if (style.regime == CrossingRegime::dot_flat && !passes.empty() && dots.empty()) continue;

    const int margin = kPitch;
    auto px = [&](int gx) { return margin + gx * kPitch; };
    const int W = px(g.width() - 1) + margin + 1;
    const int H = px(g.height() - 1) + margin + 1;
    Canvas cv(W, H, lw);

    RenderedCase out;
    out.golden = netlist;
    out.stats = stats;
    out.annotations.width = W;
    out.annotations.height = H;
    const auto& devs = netlist.devices();
    for (const auto& s : layout->symbols) {
      const BBox box{px(s.fx) - kInset, px(s.fy) - kInset, kSymbolSize, kSymbolSize};
      draw_glyph(cv, box, s.label, s.orientation, s.mirror);
      Placement p{s.device >= 0 ? devs[s.device].id : "", s.label, box, s.orientation, s.mirror};
      out.layout.push_back(p);
      DeviceDetection det;
      det.bbox = box;
      det.label = s.label;
      if (needs_orientation(s.label)) det.orientation = s.orientation;
      if (needs_mirror(s.label)) det.mirror = s.mirror;
      out.annotations.devices.push_back(det);
    }
    for (const auto& t : layout->terminals) {
      const Symbol& s = layout->symbols[t.symbol];
      cv.line(px(t.ax), px(t.ay), px(s.fx + t.slot.i), px(s.fy + t.slot.j));
    }
    for (int y = 0; y < g.height(); ++y) {
      for (int x = 0; x < g.width(); ++x) {
        const Cell& c = g.at(x, y);
        const int cx = px(x), cy = px(y);
        auto half_arms = [&](std::uint8_t arms) {
          for (int d = 0; d < 4; ++d) {
            if (arms & (1u << d)) cv.line(cx, cy, cx + kDx[d] * kPitch / 2.0, cy + kDy[d] * kPitch / 2.0);
          }
        };
        if (c.net2 < 0) {
          half_arms(c.arms);
          continue;
        }
        const bool first_horizontal = c.arms == 0b1010;
        const std::uint8_t vertical = first_horizontal ? c.arms2 : c.arms;
        half_arms(vertical);
        if (style.regime == CrossingRegime::bridge_dominant) {
          const double r = 4;
          cv.line(cx - kPitch / 2.0, cy, cx - r, cy);
          cv.line(cx + r, cy, cx + kPitch / 2.0, cy);
          cv.arc(cx, cy, r, std::numbers::pi, 2 * std::numbers::pi);
        } else {
          half_arms(0b1010);
        }
      }
    }
    for (auto [x, y] : dots) cv.disc(px(x), px(y), 3 + lw / 2.0);
    for (auto [x, y] : dots) {
      out.annotations.crossings.push_back(
          {{px(x) - kCrossHalf, px(y) - kCrossHalf, 2 * kCrossHalf + 1, 2 * kCrossHalf + 1}, CrossingStyle::dot, 1.0});
    }
    for (auto [x, y] : passes) {
      const auto st = style.regime == CrossingRegime::bridge_dominant ? CrossingStyle::bridge : CrossingStyle::flat;
      out.annotations.crossings.push_back(
          {{px(x) - kCrossHalf, px(y) - kCrossHalf, 2 * kCrossHalf + 1, 2 * kCrossHalf + 1}, st, 1.0});
    }
    if (style.text_noise) {
      for (int y = 0; y < g.height(); ++y) {
        for (int x = 0; x < g.width(); ++x) {
          const Cell& c = g.at(x, y);
          if (c.blocked || c.net >= 0 || c.access >= 0 || !rng.chance(6)) continue;
          draw_text_noise(cv, px(x), px(y), rng);
        }
      }
    }
    out.image = std::move(cv.image());
    return out;
  }
  throw RenderError("layout failed after " + std::to_string(kMaxAttempts) + " attempts");
}

std::string corpus_case_id(int index) {
  std::ostringstream os;
  os << "case_";
  os.width(4);
  os.fill('0');
  os << index;
  return os.str();
}

RenderedCase make_corpus_case(const CorpusOptions& opts, int index, CrossingRegime* regime) {
  const std::uint64_t s = mix_seed(opts.seed, static_cast<std::uint64_t>(index));
  const CrossingRegime r = opts.regime.value_or(static_cast<CrossingRegime>(index % 3));
  if (regime) *regime = r;
  RenderStyle style;
  style.regime = r;
  style.line_width = 1 + static_cast<int>(mix_seed(s, 7) % 3);
  const CircuitShape shape = r == CrossingRegime::dot_only ? CircuitShape::tree : CircuitShape::mesh;
  for (int k = 0;; ++k) {
    const std::uint64_t cs = k == 0 ? s : mix_seed(s, 100 + k);
    try {
      RenderedCase c = render(generate_circuit(cs, opts.min_devices, opts.max_devices, shape), style, cs);
      c.annotations.image = corpus_case_id(index) + ".png";
      return c;
    } catch (const RenderError&) {
      if (k + 1 >= kCircuitRetries) throw;
    }
  }
}

std::vector<CorpusEntry> write_corpus(const std::filesystem::path& dir, const CorpusOptions& opts) {
  std::filesystem::create_directories(dir);
  std::vector<CorpusEntry> entries;
  nlohmann::ordered_json manifest;
  manifest["seed"] = opts.seed;
  manifest["min_devices"] = opts.min_devices;
  manifest["max_devices"] = opts.max_devices;
  manifest["cases"] = nlohmann::ordered_json::array();
  for (int i = 0; i < opts.count; ++i) {
    CorpusEntry e;
    const RenderedCase c = make_corpus_case(opts, i, &e.regime);
    e.id = corpus_case_id(i);
    e.image = e.id + ".png";
    e.golden = e.id + ".golden.json";
    e.annotations = e.id + ".ann.json";
    e.devices = static_cast<int>(c.golden.devices().size());
    e.stats = c.stats;
    write_png((dir / e.image).string(), c.image);
    std::ofstream(dir / e.golden) << serialize_netlist(c.golden) << "\n";
    std::ofstream(dir / e.annotations) << serialize_annotations(c.annotations);
    nlohmann::ordered_json je;
    je["id"] = e.id;
    je["image"] = e.image;
    je["golden"] = e.golden;
    je["annotations"] = e.annotations;
    je["regime"] = to_string(e.regime);
    je["devices"] = e.devices;
    je["pass_overs"] = e.stats.pass_overs;
    je["dots"] = e.stats.dots;
    je["four_way_dots"] = e.stats.four_way_dots;
    manifest["cases"].push_back(std::move(je));
    entries.push_back(std::move(e));
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
  return entries;
}

std::vector<CorpusEntry> load_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("no manifest.json in " + dir.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("bad manifest: ") + e.what());
  }
  std::vector<CorpusEntry> out;
  for (const auto& je : doc.value("cases", nlohmann::json::array())) {
    CorpusEntry e;
    e.id = je.at("id").get<std::string>();
    e.image = je.at("image").get<std::string>();
    e.golden = je.at("golden").get<std::string>();
    e.annotations = je.at("annotations").get<std::string>();
    e.regime = parse_crossing_regime(je.value("regime", "bridge_dominant")).value_or(CrossingRegime::bridge_dominant);
    e.devices = je.value("devices", 0);
    e.stats.pass_overs = je.value("pass_overs", 0);
    e.stats.dots = je.value("dots", 0);
    e.stats.four_way_dots = je.value("four_way_dots", 0);
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

}  // namespace netscan
