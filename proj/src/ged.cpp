#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "netscan/graph.hpp"

namespace netscan {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kEps = -1;
constexpr int kUnset = -2;
constexpr int kWlRounds = 3;

class Interner {
 public:
  int id(const std::string& s) {
    auto [it, inserted] = ids_.try_emplace(s, static_cast<int>(ids_.size()));
    return it->second;
  }
  int size() const { return static_cast<int>(ids_.size()); }

 private:
  std::map<std::string, int> ids_;
};

// Dense form of a HeteroGraph: interned labels, neighbor lists and a
// per-pair sorted multiset of edge types.
struct Compiled {
  int n = 0;
  int edge_total = 0;
  std::vector<int> label;
  std::vector<std::vector<int>> nbrs;
  std::vector<std::vector<int>> pair_types;  // n * n

  const std::vector<int>& pair(int a, int b) const { return pair_types[a * n + b]; }
};

Compiled compile(const HeteroGraph& g, Interner& node_types, Interner& edge_types) {
  Compiled c;
  c.n = static_cast<int>(g.node_count());
  c.edge_total = static_cast<int>(g.edge_count());
  c.label.reserve(c.n);
  for (const auto& node : g.nodes()) c.label.push_back(node_types.id(node.type));
  c.nbrs.resize(c.n);
  c.pair_types.resize(static_cast<std::size_t>(c.n) * c.n);
  for (const auto& e : g.edges()) {
    const int t = edge_types.id(e.type);
    auto& ab = c.pair_types[e.a * c.n + e.b];
    if (ab.empty()) {
      c.nbrs[e.a].push_back(e.b);
      c.nbrs[e.b].push_back(e.a);
    }
    ab.push_back(t);
    c.pair_types[e.b * c.n + e.a].push_back(t);
  }
  for (auto& v : c.pair_types) std::sort(v.begin(), v.end());
  for (auto& v : c.nbrs) std::sort(v.begin(), v.end());
  return c;
}

int common_count(const std::vector<int>& a, const std::vector<int>& b) {
  int common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return common;
}

// Cheapest way to turn one parallel-edge bundle into another with unit
// insert/delete/substitute costs.
int bundle_cost(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty()) return static_cast<int>(b.size());
  if (b.empty()) return static_cast<int>(a.size());
  return static_cast<int>(std::max(a.size(), b.size())) - common_count(a, b);
}

// Weisfeiler-Lehman colors shared between both graphs. Only used to order
// candidate assignments, never for pruning.
std::pair<std::vector<std::vector<int>>, std::vector<std::vector<int>>> wl_colors(
    const Compiled& g1, const Compiled& g2) {
  std::vector<std::vector<int>> c1{g1.label}, c2{g2.label};
  for (int round = 0; round < kWlRounds; ++round) {
    std::map<std::vector<int>, int> dict;
    auto refine = [&](const Compiled& g, const std::vector<int>& prev) {
      std::vector<int> next(g.n);
      for (int v = 0; v < g.n; ++v) {
        std::vector<std::pair<int, int>> sig;
        for (int w : g.nbrs[v]) {
          for (int t : g.pair(v, w)) sig.emplace_back(t, prev[w]);
        }
        std::sort(sig.begin(), sig.end());
        std::vector<int> key{prev[v]};
        for (auto [t, c] : sig) {
          key.push_back(t);
          key.push_back(c);
        }
        next[v] = dict.try_emplace(std::move(key), static_cast<int>(dict.size())).first->second;
      }
      return next;
    };
    auto n1 = refine(g1, c1.back());
    auto n2 = refine(g2, c2.back());
    c1.push_back(std::move(n1));
    c2.push_back(std::move(n2));
  }
  return {std::move(c1), std::move(c2)};
}

// Multiset of labels split across two sides with a running count of the
// shared part, so the matching lower bound max(|A|,|B|) - |A∩B| is O(1).
class BalancedCounts {
 public:
  explicit BalancedCounts(int types) : a_(types, 0), b_(types, 0) {}

  void add_a(int t) {
    ++a_[t];
    ++size_a_;
    if (a_[t] <= b_[t]) ++common_;
  }
  void add_b(int t) {
    ++b_[t];
    ++size_b_;
    if (b_[t] <= a_[t]) ++common_;
  }
  void remove_a(int t) {
    if (a_[t] <= b_[t]) --common_;
    --a_[t];
    --size_a_;
  }
  void remove_b(int t) {
    if (b_[t] <= a_[t]) --common_;
    --b_[t];
    --size_b_;
  }
  int bound() const { return std::max(size_a_, size_b_) - common_; }
  int size_b() const { return size_b_; }

 private:
  std::vector<int> a_, b_;
  int size_a_ = 0, size_b_ = 0, common_ = 0;
};

class BranchAndBound {
 public:
  BranchAndBound(const Compiled& g1, const Compiled& g2, int node_types, int edge_types,
                 const GedOptions& options)
      : g1_(g1),
        g2_(g2),
        options_(options),
        nodes_(node_types),
        edges_(edge_types),
        map1_(g1.n, kUnset),
        inv2_(g2.n, -1) {
    for (int u = 0; u < g1.n; ++u) nodes_.add_a(g1.label[u]);
    for (int v = 0; v < g2.n; ++v) nodes_.add_b(g2.label[v]);
    for_each_edge(g1, [&](int t) { edges_.add_a(t); });
    for_each_edge(g2, [&](int t) { edges_.add_b(t); });
    std::tie(wl1_, wl2_) = wl_colors(g1, g2);
    order_ = processing_order(g1);
    best_ = g1.n + g1.edge_total + g2.n + g2.edge_total;
    root_bound_ = bound();
  }

  GedResult run() {
    const auto start = Clock::now();
    deadline_ = start + options_.budget;
    if (best_ > root_bound_) dfs(0, 0);
    GedResult r;
    r.cost = best_;
    r.optimal = !timed_out_ || best_ <= root_bound_;
    r.elapsed = Clock::now() - start;
    r.expansions = expansions_;
    return r;
  }

  const std::vector<int>& best_mapping() const { return best_map_; }

 private:
  struct Child {
    int f;
    int similarity;
    int v;
    int inc;
  };

  template <class F>
  static void for_each_edge(const Compiled& g, F&& f) {
    for (int a = 0; a < g.n; ++a) {
      for (int b : g.nbrs[a]) {
        if (b <= a) continue;
        for (int t : g.pair(a, b)) f(t);
      }
    }
  }

  // Highest degree first, then always the node most attached to the nodes
  // already ordered, so edge costs surface early.
  static std::vector<int> processing_order(const Compiled& g) {
    std::vector<int> order;
    std::vector<int> attached(g.n, 0);
    std::vector<char> taken(g.n, 0);
    auto degree = [&](int v) {
      int d = 0;
      for (int w : g.nbrs[v]) d += static_cast<int>(g.pair(v, w).size());
      return d;
    };
    for (int k = 0; k < g.n; ++k) {
      int pick = -1;
      for (int v = 0; v < g.n; ++v) {
        if (taken[v]) continue;
        if (pick < 0 || attached[v] > attached[pick] ||
            (attached[v] == attached[pick] && degree(v) > degree(pick))) {
          pick = v;
        }
      }
      taken[pick] = 1;
      order.push_back(pick);
      for (int w : g.nbrs[pick]) attached[w] += static_cast<int>(g.pair(pick, w).size());
    }
    return order;
  }

  int bound() const { return nodes_.bound() + edges_.bound(); }

  int step_cost(int u, int v) const {
    int c = v == kEps ? 1 : (g1_.label[u] != g2_.label[v] ? 1 : 0);
    static const std::vector<int> kNone;
    for (int w : g1_.nbrs[u]) {
      const int mw = map1_[w];
      if (mw == kUnset) continue;
      const auto& b = (v >= 0 && mw >= 0) ? g2_.pair(v, mw) : kNone;
      c += bundle_cost(g1_.pair(u, w), b);
    }
    if (v >= 0) {
      for (int x : g2_.nbrs[v]) {
        const int w = inv2_[x];
        if (w >= 0 && g1_.pair(u, w).empty()) c += static_cast<int>(g2_.pair(v, x).size());
      }
    }
    return c;
  }

  void apply(int u, int v) {
    nodes_.remove_a(g1_.label[u]);
    for (int w : g1_.nbrs[u]) {
      if (map1_[w] == kUnset) continue;
      for (int t : g1_.pair(u, w)) edges_.remove_a(t);
    }
    map1_[u] = v;
    if (v >= 0) {
      nodes_.remove_b(g2_.label[v]);
      for (int x : g2_.nbrs[v]) {
        if (inv2_[x] < 0) continue;
        for (int t : g2_.pair(v, x)) edges_.remove_b(t);
      }
      inv2_[v] = u;
    }
  }

  void undo(int u, int v) {
    if (v >= 0) {
      inv2_[v] = -1;
      for (int x : g2_.nbrs[v]) {
        if (inv2_[x] < 0) continue;
        for (int t : g2_.pair(v, x)) edges_.add_b(t);
      }
      nodes_.add_b(g2_.label[v]);
    }
    map1_[u] = kUnset;
    for (int w : g1_.nbrs[u]) {
      if (map1_[w] == kUnset) continue;
      for (int t : g1_.pair(u, w)) edges_.add_a(t);
    }
    nodes_.add_a(g1_.label[u]);
  }

  int similarity(int u, int v) const {
    int s = 0;
    while (s <= kWlRounds && wl1_[s][u] == wl2_[s][v]) ++s;
    return s;
  }

  bool out_of_budget() {
    if (options_.max_expansions != 0 && expansions_ >= options_.max_expansions) return true;
    if ((expansions_ & 127) == 0 && Clock::now() >= deadline_) return true;
    return false;
  }

  void dfs(int depth, int g) {
    if (done_) return;
    ++expansions_;
    if (out_of_budget()) {
      timed_out_ = true;
      done_ = true;
      return;
    }
    if (depth == g1_.n) {
      // Remaining g2 nodes and their edges are insertions; the bound is exact here.
      const int total = g + bound();
      if (total < best_) {
        best_ = total;
        best_map_ = map1_;
        if (best_ <= root_bound_) done_ = true;
      }
      return;
    }
    const int u = order_[depth];
    std::vector<Child> children;
    children.reserve(g2_.n + 1);
    auto consider = [&](int v) {
      const int inc = step_cost(u, v);
      apply(u, v);
      const int f = g + inc + bound();
      undo(u, v);
      if (f < best_) children.push_back({f, v >= 0 ? similarity(u, v) : -1, v, inc});
    };
    for (int v = 0; v < g2_.n; ++v) {
      if (inv2_[v] < 0) consider(v);
    }
    consider(kEps);
    std::sort(children.begin(), children.end(), [](const Child& a, const Child& b) {
      if (a.f != b.f) return a.f < b.f;
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      const int ka = a.v < 0 ? std::numeric_limits<int>::max() : a.v;
      const int kb = b.v < 0 ? std::numeric_limits<int>::max() : b.v;
      return ka < kb;
    });
    for (const Child& c : children) {
      if (c.f >= best_) break;
      apply(u, c.v);
      dfs(depth + 1, g + c.inc);
      undo(u, c.v);
      if (done_) return;
    }
  }

  const Compiled& g1_;
  const Compiled& g2_;
  GedOptions options_;
  BalancedCounts nodes_;
  BalancedCounts edges_;
  std::vector<int> map1_;
  std::vector<int> inv2_;
  std::vector<int> order_;
  std::vector<std::vector<int>> wl1_, wl2_;
  std::vector<int> best_map_;
  int best_ = 0;
  int root_bound_ = 0;
  std::uint64_t expansions_ = 0;
  Clock::time_point deadline_;
  bool timed_out_ = false;
  bool done_ = false;
};

std::string edge_label(const HeteroGraph& g, int a, int b, const std::string& type) {
  return type + " " + g.nodes()[a].id + "-" + g.nodes()[b].id;
}

// Reconstructs the edit script of a complete mapping of g1 onto g2.
std::vector<EditOp> edit_script(const HeteroGraph& h1, const HeteroGraph& h2,
                                const std::vector<int>& map1) {
  std::vector<EditOp> ops;
  const int n1 = static_cast<int>(h1.node_count());
  const int n2 = static_cast<int>(h2.node_count());
  std::vector<int> inv2(n2, -1);
  for (int u = 0; u < n1; ++u) {
    const int v = map1[u];
    const auto& a = h1.nodes()[u];
    if (v < 0) {
      ops.push_back({EditKind::remove, EditTarget::node, a.type + " " + a.id});
      continue;
    }
    inv2[v] = u;
    const auto& b = h2.nodes()[v];
    if (a.type != b.type) {
      ops.push_back({EditKind::substitute, EditTarget::node, a.type + "->" + b.type + " " + a.id});
    }
  }
  for (int v = 0; v < n2; ++v) {
    if (inv2[v] < 0) {
      const auto& b = h2.nodes()[v];
      ops.push_back({EditKind::insert, EditTarget::node, b.type + " " + b.id});
    }
  }
  // Bundle edges by unordered endpoint pair, translating g1 pairs into g2 ids.
  std::map<std::pair<int, int>, std::vector<std::string>> from1, from2;
  std::map<std::pair<int, int>, std::pair<int, int>> origin1;
  for (const auto& e : h1.edges()) {
    const int ma = map1[e.a], mb = map1[e.b];
    if (ma < 0 || mb < 0) {
      ops.push_back({EditKind::remove, EditTarget::edge, edge_label(h1, e.a, e.b, e.type)});
      continue;
    }
    auto key = std::minmax(ma, mb);
    from1[key].push_back(e.type);
    origin1[key] = {e.a, e.b};
  }
  for (const auto& e : h2.edges()) from2[std::minmax(e.a, e.b)].push_back(e.type);
  std::vector<std::pair<int, int>> keys;
  for (const auto& [k, _] : from1) keys.push_back(k);
  for (const auto& [k, _] : from2) {
    if (!from1.contains(k)) keys.push_back(k);
  }
  for (const auto& key : keys) {
    auto a = from1.contains(key) ? from1[key] : std::vector<std::string>{};
    auto b = from2.contains(key) ? from2[key] : std::vector<std::string>{};
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::string> only_a, only_b;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
    const std::size_t subs = std::min(only_a.size(), only_b.size());
    for (std::size_t i = 0; i < subs; ++i) {
      ops.push_back({EditKind::substitute, EditTarget::edge,
                     only_a[i] + "->" + edge_label(h2, key.first, key.second, only_b[i])});
    }
    for (std::size_t i = subs; i < only_a.size(); ++i) {
      const auto [oa, ob] = origin1[key];
      ops.push_back({EditKind::remove, EditTarget::edge, edge_label(h1, oa, ob, only_a[i])});
    }
    for (std::size_t i = subs; i < only_b.size(); ++i) {
      ops.push_back({EditKind::insert, EditTarget::edge,
                     edge_label(h2, key.first, key.second, only_b[i])});
    }
  }
  return ops;
}

}  // namespace

GedResult ged(const HeteroGraph& g1, const HeteroGraph& g2, const GedOptions& options) {
  Interner node_types, edge_types;
  const Compiled c1 = compile(g1, node_types, edge_types);
  const Compiled c2 = compile(g2, node_types, edge_types);
  BranchAndBound search(c1, c2, node_types.size(), edge_types.size(), options);
  GedResult result = search.run();
  if (options.collect_edit_ops) {
    std::vector<int> mapping = search.best_mapping();
    if (mapping.empty()) mapping.assign(c1.n, kEps);  // nothing beat delete-all/insert-all
    result.edit_ops = edit_script(g1, g2, mapping);
  }
  return result;
}

int ged_bruteforce(const HeteroGraph& g1, const HeteroGraph& g2) {
  const std::size_t n1 = g1.node_count();
  const std::size_t n2 = g2.node_count();
  if (n1 + n2 > kBruteForceNodeLimit) {
    throw GraphError("brute-force GED limited to " + std::to_string(kBruteForceNodeLimit) +
                     " nodes in total");
  }
  // Plain adjacency: edge-type strings per unordered pair.
  auto bundles = [](const HeteroGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<std::vector<std::string>>> m(n, std::vector<std::vector<std::string>>(n));
    for (const auto& e : g.edges()) {
      m[e.a][e.b].push_back(e.type);
      m[e.b][e.a].push_back(e.type);
    }
    for (auto& row : m) {
      for (auto& cell : row) std::sort(cell.begin(), cell.end());
    }
    return m;
  };
  const auto m1 = bundles(g1);
  const auto m2 = bundles(g2);
  auto pair_cost = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    return static_cast<int>(std::max(a.size(), b.size()) - both.size());
  };

  // Breadth-first visiting order so partial costs grow early.
  std::vector<int> order;
  std::vector<char> seen(n1, 0);
  for (std::size_t s = 0; s < n1; ++s) {
    if (seen[s]) continue;
    seen[s] = 1;
    order.push_back(static_cast<int>(s));
    for (std::size_t head = order.size() - 1; head < order.size(); ++head) {
      const int a = order[head];
      for (std::size_t b = 0; b < n1; ++b) {
        if (!seen[b] && !m1[a][b].empty()) {
          seen[b] = 1;
          order.push_back(static_cast<int>(b));
        }
      }
    }
  }

  int best = static_cast<int>(n1 + g1.edge_count() + n2 + g2.edge_count());
  std::vector<int> image(n1, kEps);
  std::vector<char> used(n2, 0);
  static const std::vector<std::string> kEmpty;

  auto finish = [&](int cost) {
    for (std::size_t v = 0; v < n2; ++v) {
      if (!used[v]) ++cost;
    }
    for (const auto& e : g2.edges()) {
      if (!used[e.a] || !used[e.b]) ++cost;
    }
    return cost;
  };

  auto recurse = [&](auto&& self, std::size_t k, int cost) -> void {
    if (cost >= best) return;
    if (k == n1) {
      best = std::min(best, finish(cost));
      return;
    }
    const int u = order[k];
    for (int v = 0; v <= static_cast<int>(n2); ++v) {
      const bool eps = v == static_cast<int>(n2);
      if (!eps && used[v]) continue;
      int c = eps ? 1 : (g1.nodes()[u].type == g2.nodes()[v].type ? 0 : 1);
      for (std::size_t j = 0; j < k; ++j) {
        const int w = order[j];
        const int x = image[w];
        const auto& b = (!eps && x != kEps) ? m2[v][x] : kEmpty;
        c += pair_cost(m1[u][w], b);
      }
      image[u] = eps ? kEps : v;
      if (!eps) used[v] = 1;
      self(self, k + 1, cost + c);
      if (!eps) used[v] = 0;
      image[u] = kEps;
    }
  };
  recurse(recurse, 0, 0);
  return best;
}

}  // namespace netscan
