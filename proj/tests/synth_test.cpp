#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "netscan/eval.hpp"
#include "netscan/symbols.hpp"
#include "netscan/synth.hpp"
#include "netscan/topology.hpp"

using namespace netscan;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("generator is deterministic") {
  CHECK(generate_circuit(1, 2, 2) == generate_circuit(1, 2, 2));
  CHECK(generate_circuit(1, 2, 2).devices().size() == 2);
  CHECK(generate_circuit(9, 5, 25) == generate_circuit(9, 5, 25));
  CHECK_FALSE(generate_circuit(9, 5, 25) == generate_circuit(10, 5, 25));
  CHECK_THROWS_AS(generate_circuit(1, 1, 5), std::invalid_argument);
  CHECK_THROWS_AS(generate_circuit(1, 5, 41), std::invalid_argument);
  CHECK_THROWS_AS(generate_circuit(1, 9, 5), std::invalid_argument);
}

TEST_CASE("generated circuits are valid and connected") {
  for (CircuitShape shape : {CircuitShape::mesh, CircuitShape::tree}) {
    for (std::uint64_t s = 0; s < 200; ++s) {
      const Netlist n = generate_circuit(s, 2, 30, shape);
      CHECK(validate(n).empty());
      const auto nets = n.nets();
      CHECK(std::count(nets.begin(), nets.end(), "GND") == 1);
      // Connectivity over the device-net graph.
      std::vector<int> comp(n.devices().size());
      std::iota(comp.begin(), comp.end(), 0);
      std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
      std::map<std::string, int> first;
      for (int d = 0; d < static_cast<int>(n.devices().size()); ++d) {
        for (const auto& b : n.devices()[d].ports) {
          auto [it, fresh] = first.emplace(b.net, d);
          if (!fresh) comp[find(d)] = find(it->second);
        }
      }
      for (int d = 0; d < static_cast<int>(n.devices().size()); ++d) CHECK(find(d) == find(0));
    }
  }
}

TEST_CASE("device counts are uniform") {
  std::vector<int> hist(21, 0);
  const int samples = 1000;
  for (int s = 0; s < samples; ++s) {
    const auto k = generate_circuit(static_cast<std::uint64_t>(s), 5, 25).devices().size();
    REQUIRE(k >= 5);
    REQUIRE(k <= 25);
    ++hist[k - 5];
  }
  const double expected = samples / 21.0;
  double chi2 = 0;
  for (int h : hist) chi2 += (h - expected) * (h - expected) / expected;
  // 20 degrees of freedom, 99.9th percentile.
  CHECK(chi2 < 45.31);
}

TEST_CASE("single resistor render") {
  const Netlist n = make_netlist({{"R1", DeviceLabel::resistor_1, {{"Pos", "a"}, {"Neg", "a"}}}});
  const RenderedCase rc = render(n, {CrossingRegime::bridge_dominant, 1, false}, 1);
  REQUIRE(rc.annotations.devices.size() == 1);
  const BBox box = rc.annotations.devices[0].bbox;
  CHECK(box.w == kSymbolSize);
  CHECK(box.h == kSymbolSize);
  CHECK(rc.annotations.crossings.empty());
  CHECK(rc.annotations.width == rc.image.width());
  // Leads run from edge to edge of the box along one axis.
  int top = 0, bottom = 0, left = 0, right = 0;
  for (int k = 0; k < kSymbolSize; ++k) {
    top += rc.image(box.x + k, box.y) < 128;
    bottom += rc.image(box.x + k, box.bottom()) < 128;
    left += rc.image(box.x, box.y + k) < 128;
    right += rc.image(box.right(), box.y + k) < 128;
  }
  CHECK(((top > 0 && bottom > 0) || (left > 0 && right > 0)));
  const auto r = convert(rc.image, OracleDetector(rc.annotations));
  CHECK(ned(n, r.netlist).value == 0.0);
}

TEST_CASE("render is deterministic and validates input") {
  const Netlist n = generate_circuit(4, 6, 10);
  const RenderStyle style{CrossingRegime::dot_flat, 2, true};
  const auto a = render(n, style, 77);
  const auto b = render(n, style, 77);
  CHECK(a.image == b.image);
  CHECK(a.annotations == b.annotations);
  CHECK_THROWS_AS(render(Netlist{}, style, 1), RenderError);
  const Netlist dangling = make_netlist({{"R1", DeviceLabel::resistor_1, {{"Pos", "a"}, {"Neg", "b"}}}});
  CHECK_THROWS_AS(render(dangling, style, 1), RenderError);
}

TEST_CASE("crossing symbols follow the regime") {
  for (CrossingRegime r : {CrossingRegime::bridge_dominant, CrossingRegime::dot_flat, CrossingRegime::dot_only}) {
    CorpusOptions opts;
    opts.seed = 3;
    opts.regime = r;
    opts.min_devices = 8;
    opts.max_devices = 16;
    for (int i = 0; i < 4; ++i) {
      const RenderedCase rc = make_corpus_case(opts, i);
      int bridges = 0, flats = 0, dots = 0;
      for (const auto& c : rc.annotations.crossings) {
        bridges += c.style == CrossingStyle::bridge;
        flats += c.style == CrossingStyle::flat;
        dots += c.style == CrossingStyle::dot;
      }
      CHECK(dots == rc.stats.dots);
      if (r == CrossingRegime::dot_only) CHECK(bridges + flats == 0);
      if (r == CrossingRegime::bridge_dominant) CHECK(flats == 0);
      if (r == CrossingRegime::dot_flat) {
        CHECK(bridges == 0);
        if (flats > 0) CHECK(dots > 0);
      }
    }
  }
}

TEST_CASE("round trip on a small corpus") {
  CorpusOptions opts;
  opts.seed = 17;
  opts.min_devices = 3;
  opts.max_devices = 14;
  for (int i = 0; i < 9; ++i) {
    CrossingRegime regime{};
    const RenderedCase rc = make_corpus_case(opts, i, &regime);
    CHECK(regime == static_cast<CrossingRegime>(i % 3));
    CHECK(validate(rc.golden).empty());
    const auto r = convert(rc.image, OracleDetector(rc.annotations));
    const auto d = ned(rc.golden, r.netlist);
    CHECK_MESSAGE(d.value == 0.0, corpus_case_id(i));
    CHECK(d.ged.optimal);
    CHECK(r.diagnostics.empty());
    CHECK_FALSE(has_2x2_block(skeletonize(binarize(rc.image).image)));
  }
}

TEST_CASE("corpus on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "netscan_synth_test";
  std::filesystem::remove_all(dir);
  CorpusOptions opts;
  opts.seed = 7;
  opts.count = 4;
  opts.min_devices = 3;
  opts.max_devices = 8;
  const auto entries = write_corpus(dir, opts);
  REQUIRE(entries.size() == 4);
  CHECK(entries[0].id == "case_0000");
  const std::string manifest = slurp(dir / "manifest.json");
  const std::string png = slurp(dir / entries[3].image);
  write_corpus(dir, opts);
  CHECK(slurp(dir / "manifest.json") == manifest);
  CHECK(slurp(dir / entries[3].image) == png);

  const auto loaded = load_manifest(dir);
  REQUIRE(loaded.size() == 4);
  for (std::size_t k = 0; k < loaded.size(); ++k) {
    CHECK(loaded[k].id == entries[k].id);
    CHECK(loaded[k].devices >= 3);
    CHECK(loaded[k].devices <= 8);
    const Netlist golden = parse_netlist(slurp(dir / loaded[k].golden));
    const Annotations ann = load_annotations((dir / loaded[k].annotations).string());
    const GrayImage img = read_png((dir / loaded[k].image).string());
    CHECK(ned(golden, convert(img, OracleDetector(ann)).netlist).value == 0.0);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("regime names") {
  CHECK(parse_crossing_regime("dot_only") == CrossingRegime::dot_only);
  CHECK(to_string(CrossingRegime::bridge_dominant) == "bridge_dominant");
  CHECK_FALSE(parse_crossing_regime("dots").has_value());
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
}
