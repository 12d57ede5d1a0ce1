// Acceptance checks; one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>

#include "fixtures.hpp"
#include "netscan/eval.hpp"
#include "netscan/metrics.hpp"
#include "netscan/synth.hpp"
#include "netscan/topology.hpp"

using namespace netscan;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome golden_ged() {
  const auto t0 = Clock::now();
  const auto g = netlist_to_graph(testing::fig2_circuit());
  const auto e = netlist_to_graph(testing::fig2_erroneous());
  const GedResult r = ged(e, g);
  const int brute = ged_bruteforce(e, g);
  const double t = seconds_since(t0);
  return {r.cost == 6 && r.optimal && brute == 6 && t < 60.0,
          fmt("solver cost %d (optimal %d), brute force %d, %.2fs", r.cost, r.optimal, brute, t)};
}

Outcome golden_ned() {
  const NedResult r = ned(testing::fig2_circuit(), testing::fig2_erroneous());
  // Counting rule: devices + nets + bound ports of the golden circuit = 6 + 4 + 17.
  const bool ok = r.denominator == 27 && std::abs(r.value - 6.0 / 27.0) < 1e-6;
  return {ok, fmt("NED %.6f = %d/%d; the published 0.214 needs denominator 28 and is not reproduced "
                  "by the counting rule",
                  r.value, r.cost, r.denominator)};
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  int agree = 0;
  const int pairs = 200;
  for (int i = 0; i < pairs; ++i) {
    const auto a = testing::random_graph(rng, 6, 8);
    const auto b = testing::random_graph(rng, 6, 8);
    const GedResult r = ged(a, b);
    agree += r.optimal && r.cost == ged_bruteforce(a, b);
  }
  const double t = seconds_since(t0);
  return {agree == pairs && t < 300.0, fmt("%d/%d pairs agree, %.2fs", agree, pairs, t)};
}

CorpusOptions corpus_options() {
  CorpusOptions o;
  o.seed = 2025;
  o.count = 50;
  o.min_devices = 5;
  o.max_devices = 25;
  return o;
}

struct CorpusCase {
  RenderedCase rc;
  CrossingRegime regime;
};

const std::vector<CorpusCase>& corpus() {
  static const std::vector<CorpusCase> cases = [] {
    std::vector<CorpusCase> out;
    const auto o = corpus_options();
    for (int i = 0; i < o.count; ++i) {
      CrossingRegime r{};
      RenderedCase rc = make_corpus_case(o, i, &r);
      out.push_back({std::move(rc), r});
    }
    return out;
  }();
  return cases;
}

Outcome round_trip() {
  const auto t0 = Clock::now();
  const auto& cases = corpus();
  std::set<DeviceLabel> kinds;
  std::set<CrossingRegime> regimes;
  int zero = 0, devices_ok = 0;
  double ged_seconds = 0;
  for (const auto& c : cases) {
    for (const auto& d : c.rc.annotations.devices) kinds.insert(d.label);
    regimes.insert(c.regime);
    const auto n = static_cast<int>(c.rc.golden.devices().size());
    devices_ok += n >= 5 && n <= 25;
    const auto conv = convert(c.rc.image, OracleDetector(c.rc.annotations));
    const auto g0 = Clock::now();
    const NedResult r = ned(c.rc.golden, conv.netlist);
    ged_seconds += seconds_since(g0);
    zero += r.ged.optimal && r.cost == 0;
  }
  const double t = seconds_since(t0) - ged_seconds;
  const int total = static_cast<int>(cases.size());
  const bool ok = total == 50 && zero == total && devices_ok == total && kinds.size() == kDeviceLabelCount &&
                  regimes.size() == 3 && t < 120.0;
  return {ok, fmt("%d/%d cases at NED 0, %zu/%d kinds, %zu regimes, %.2fs excluding GED", zero, total,
                  kinds.size(), kDeviceLabelCount, regimes.size(), t)};
}

Outcome ablation() {
  // Cases whose crossings matter: pass-overs need jumpers, four-way dots
  // must not become jumpers.
  int jumper_cases = 0, dot_cases = 0;
  std::vector<const CorpusCase*> subset;
  for (const auto& c : corpus()) {
    const bool jumper = c.rc.stats.pass_overs > 0;
    const bool dot = c.rc.stats.four_way_dots > 0;
    jumper_cases += jumper;
    dot_cases += dot;
    if (jumper || dot) subset.push_back(&c);
  }
  // Ablated candidates can be far from the golden circuit; a fixed expansion
  // cap keeps the run deterministic. The cost is then an upper bound, and any
  // unproven result counts as a failure.
  GedOptions opts;
  opts.max_expansions = 200'000;
  struct Tally {
    int success = 0;
    double ned_sum = 0;
  };
  std::map<JumperMode, Tally> tally;
  for (const auto* c : subset) {
    const OracleDetector oracle(c->rc.annotations);
    for (JumperMode m : {JumperMode::automatic, JumperMode::all, JumperMode::none}) {
      ConvertOptions co;
      co.mode = m;
      const NedResult r = ned(c->rc.golden, convert(c->rc.image, oracle, co).netlist, opts);
      tally[m].success += r.ged.optimal && r.cost == 0;
      tally[m].ned_sum += r.value;
    }
  }
  const double n = static_cast<double>(subset.size());
  auto rate = [&](JumperMode m) { return n > 0 ? tally[m].success / n : 0.0; };
  auto mean = [&](JumperMode m) { return n > 0 ? tally[m].ned_sum / n : 0.0; };
  const JumperMode a = JumperMode::automatic, all = JumperMode::all, none = JumperMode::none;
  const bool ok = jumper_cases >= 10 && dot_cases >= 10 && rate(a) == 1.0 && rate(all) < 1.0 && rate(none) < 1.0 &&
                  mean(all) > mean(a) && mean(none) > mean(a);
  return {ok, fmt("%zu cases (%d with jumpers, %d with four-way dots); success auto %.3f all %.3f none %.3f; "
                  "mean NED auto %.4f all %.4f none %.4f",
                  subset.size(), jumper_cases, dot_cases, rate(a), rate(all), rate(none), mean(a), mean(all),
                  mean(none))};
}

Outcome skeleton_width() {
  int clean = 0;
  for (const auto& c : corpus()) clean += !has_2x2_block(skeletonize(binarize(c.rc.image).image));
  const int total = static_cast<int>(corpus().size());
  return {clean == total, fmt("%d/%d skeletons free of 2x2 blocks", clean, total)};
}

Outcome jumper_pairing() {
  int bad = 0;
  for (int n = 4; n <= 12; n += 2) {
    std::set<int> image;
    for (int i = 0; i < n; ++i) {
      const auto j = jumper_partner(i, n);
      if (!j || jumper_partner(*j, n) != i || *j == i) ++bad;
      if (j && i < n / 2 && *j != i + n / 2) ++bad;
      if (j) image.insert(*j);
    }
    if (static_cast<int>(image.size()) != n) ++bad;
  }
  int rejected = 0;
  for (int n : {0, 1, 2, 3, 5, 7, 9, 11, 13}) rejected += !jumper_partner(0, n).has_value();
  return {bad == 0 && rejected == 9, fmt("even N 4..12: %d violations; %d/9 odd or small N rejected", bad, rejected)};
}

Outcome empty_candidate() {
  std::mt19937_64 rng(99);
  int exact = 0;
  for (int i = 0; i < 20; ++i) {
    const Netlist g = testing::random_netlist(rng, 2 + i % 6);
    const NedResult r = ned(g, Netlist{});
    exact += r.value == 1.0 && r.ged.optimal;
  }
  return {exact == 20, fmt("%d/20 netlists give NED exactly 1", exact)};
}

Outcome detection_metrics() {
  auto box = [](std::string image, std::string label, BBox b, double conf = 1.0) {
    return LabeledBox{std::move(image), std::move(label), b, conf};
  };
  const std::vector<LabeledBox> gold{box("a", "nmos", {0, 0, 10, 10}), box("a", "pmos", {50, 50, 10, 10})};
  const std::vector<LabeledBox> exact = gold;
  const std::vector<LabeledBox> half{box("a", "nmos", {0, 0, 10, 10}), box("a", "pmos", {80, 80, 10, 10})};
  // Shifted by 4 px: IoU 36/164 < 0.5, centers still inside.
  const std::vector<LabeledBox> shifted{box("a", "nmos", {4, 4, 10, 10}), box("a", "pmos", {54, 54, 10, 10})};
  // IoU 81/100 for the single class: matched at 0.50..0.80 only.
  const std::vector<LabeledBox> g1{box("b", "r", {0, 0, 10, 10})};
  const std::vector<LabeledBox> p1{box("b", "r", {0, 0, 9, 9})};
  const bool ok = map_at(exact, gold, 0.5) == 1.0 && map_at(half, gold, 0.5) == 0.5 &&
                  map_at(shifted, gold, 0.5) == 0.0 && map_inside(shifted, gold) == 1.0 &&
                  std::abs(map_50_95(p1, g1) - 0.7) < 1e-12 && std::abs(map_50_95(exact, gold) - 1.0) < 1e-12;
  return {ok, fmt("mAP@50 %.2f/%.2f/%.2f, mAP@inside on shifted %.2f, mAP@50-95 at IoU 0.81 %.2f",
                  map_at(exact, gold, 0.5), map_at(half, gold, 0.5), map_at(shifted, gold, 0.5),
                  map_inside(shifted, gold), map_50_95(p1, g1))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 golden GED", golden_ged},
      {"2 golden NED", golden_ned},
      {"3 GED oracle equivalence", oracle_equivalence},
      {"4 round-trip soundness", round_trip},
      {"5 jumper policy ablation", ablation},
      {"6 skeleton width", skeleton_width},
      {"7 jumper pairing", jumper_pairing},
      {"8 empty candidate", empty_candidate},
      {"9 detection metrics", detection_metrics},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("NOT-REPRODUCIBLE criterion 10 published accuracy figures: need trained detectors and the "
              "original test images\n");
  return failed == 0 ? 0 : 1;
}
