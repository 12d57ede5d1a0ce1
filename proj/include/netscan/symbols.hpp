#pragma once

#include <string_view>
#include <vector>

#include "netscan/detection.hpp"
#include "netscan/netlist.hpp"

namespace netscan {

// Every symbol occupies a 3x3 lattice of routing points spaced kPitch apart;
// the box extends kInset pixels beyond the outer lattice points.
inline constexpr int kPitch = 16;
inline constexpr int kInset = 4;
inline constexpr int kSymbolSize = 2 * kPitch + 2 * kInset + 1;  // 41

enum class Side : std::uint8_t { top, right, bottom, left };

// A terminal sits on lattice point (i, j), i = column, j = row (downwards),
// and leaves the box through `side`.
struct TerminalSlot {
  std::string_view port;
  int i = 0;
  int j = 0;
  Side side = Side::top;

  bool operator==(const TerminalSlot&) const = default;
};

// Terminal layout at orientation u without mirroring. Body (bulk kinds) and
// Conn (cross kinds) are included only when `with_extra` is set.
std::vector<TerminalSlot> terminal_template(DeviceLabel label, bool with_extra = true);

// Mirror (column i -> 2 - i) first, then rotate clockwise in 90 degree steps.
TerminalSlot transform(TerminalSlot slot, Orientation o, bool mirror);

// Position of `slot` on the ring one pixel outside `box`.
Point ring_point(const BBox& box, const TerminalSlot& slot);

// Clockwise arc position on the ring around `box`, starting at its top-left corner.
int ring_position(const BBox& box, Point p);
int ring_length(const BBox& box);
Point ring_at(const BBox& box, int pos);

}  // namespace netscan
