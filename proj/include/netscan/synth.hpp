#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netscan/detection.hpp"
#include "netscan/netlist.hpp"
#include "netscan/raster.hpp"

namespace netscan {

// Which crossing symbols a diagram uses. Connections always get dots;
// pass-overs are bridges, flat crossings, or avoided altogether.
enum class CrossingRegime : std::uint8_t { bridge_dominant, dot_flat, dot_only };

std::string_view to_string(CrossingRegime r);
std::optional<CrossingRegime> parse_crossing_regime(std::string_view text);

struct RenderStyle {
  CrossingRegime regime = CrossingRegime::bridge_dominant;
  int line_width = 1;
  bool text_noise = true;  // small glyph clutter in empty cells
};

struct Placement {
  std::string device_id;  // empty for gnd symbols
  DeviceLabel label = DeviceLabel::gnd;
  BBox bbox;
  Orientation orientation = Orientation::u;
  bool mirror = false;
};

struct RenderStats {
  int pass_overs = 0;
  int dots = 0;
  int four_way_dots = 0;
  int attempts = 0;
};

struct RenderedCase {
  GrayImage image;
  Netlist golden;
  Annotations annotations;
  std::vector<Placement> layout;
  RenderStats stats;
};

class RenderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// mesh: spare ports join random nets. tree: spare ports all go to GND, so
// the remaining nets form a tree and the diagram can be drawn without crossings.
enum class CircuitShape : std::uint8_t { mesh, tree };

// Connected random netlist with a GND net; every net has at least two
// ports. Device count is uniform in [min_devices, max_devices] within [2, 40].
Netlist generate_circuit(std::uint64_t seed, int min_devices, int max_devices,
                         CircuitShape shape = CircuitShape::mesh);

// Grid placement and maze routing; throws RenderError after the retry bound.
RenderedCase render(const Netlist& netlist, const RenderStyle& style, std::uint64_t seed);

struct CorpusOptions {
  std::uint64_t seed = 1;
  int count = 10;
  int min_devices = 5;
  int max_devices = 25;
  std::optional<CrossingRegime> regime;  // nullopt cycles through all three
};

struct CorpusEntry {
  std::string id;
  std::string image;        // paths relative to the corpus directory
  std::string golden;
  std::string annotations;
  CrossingRegime regime = CrossingRegime::bridge_dominant;
  int devices = 0;
  RenderStats stats;
};

// Case `index` of the corpus described by `opts`, without touching disk.
// dot_only cases use tree-shaped circuits; a circuit that cannot be laid
// out is replaced by the next one from the same case seed.
RenderedCase make_corpus_case(const CorpusOptions& opts, int index, CrossingRegime* regime = nullptr);
std::string corpus_case_id(int index);

std::vector<CorpusEntry> write_corpus(const std::filesystem::path& dir, const CorpusOptions& opts);
std::vector<CorpusEntry> load_manifest(const std::filesystem::path& dir);

}  // namespace netscan
