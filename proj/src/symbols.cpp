#include "netscan/symbols.hpp"

#include <cmath>
#include <utility>

namespace netscan {

std::vector<TerminalSlot> terminal_template(DeviceLabel label, bool with_extra) {
  const DeviceKind& kind = device_kind(label);
  std::vector<TerminalSlot> t;
  switch (kind.group) {
    case DeviceGroup::MOS:
    case DeviceGroup::BJT:
      t = {{kind.ports[0], 1, 2, Side::bottom}, {kind.ports[1], 0, 1, Side::left}, {kind.ports[2], 2, 1, Side::right}};
      if (with_extra && kind.has_body) t.push_back({"Body", 1, 0, Side::top});
      if (with_extra && kind.is_cross) t.push_back({kConnPort, 1, 0, Side::top});
      break;
    case DeviceGroup::Amp:
      if (label == DeviceLabel::siso_amp) {
        t = {{"In", 1, 0, Side::top}, {"Out", 1, 2, Side::bottom}};
      } else if (label == DeviceLabel::diso_amp) {
        t = {{"InP", 0, 0, Side::top}, {"InN", 2, 0, Side::top}, {"Out", 1, 2, Side::bottom}};
      } else {
        t = {{"InP", 0, 0, Side::top}, {"InN", 2, 0, Side::top}, {"OutP", 2, 2, Side::bottom},
             {"OutN", 0, 2, Side::bottom}};
      }
      break;
    case DeviceGroup::Gnd:
      t = {{kGndPin, 1, 0, Side::top}};
      break;
    default:
      t = {{"Pos", 1, 0, Side::top}, {"Neg", 1, 2, Side::bottom}};
      break;
  }
  return t;
}

namespace {

Side rotate_cw(Side s) { return static_cast<Side>((static_cast<int>(s) + 1) % 4); }

}  // namespace

TerminalSlot transform(TerminalSlot slot, Orientation o, bool mirror) {
  if (mirror) {
    slot.i = 2 - slot.i;
    if (slot.side == Side::left) {
      slot.side = Side::right;
    } else if (slot.side == Side::right) {
      slot.side = Side::left;
    }
  }
  for (int k = 0; k < static_cast<int>(o); ++k) {
    slot = {slot.port, 2 - slot.j, slot.i, rotate_cw(slot.side)};
  }
  return slot;
}

Point ring_point(const BBox& box, const TerminalSlot& slot) {
  // Lattice offset scaled to the actual box size.
  auto along = [](int k, int extent) {
    const double f = static_cast<double>(kInset + kPitch * k) / (kSymbolSize - 1);
    return static_cast<int>(std::lround(f * (extent - 1)));
  };
  switch (slot.side) {
    case Side::top:
      return {box.x + along(slot.i, box.w), box.y - 1};
    case Side::bottom:
      return {box.x + along(slot.i, box.w), box.bottom() + 1};
    case Side::left:
      return {box.x - 1, box.y + along(slot.j, box.h)};
    case Side::right:
      return {box.right() + 1, box.y + along(slot.j, box.h)};
  }
  return {};
}

int ring_length(const BBox& box) { return 2 * (box.w + 1) + 2 * (box.h + 1); }

int ring_position(const BBox& box, Point p) {
  const int x0 = box.x - 1, y0 = box.y - 1, x1 = box.right() + 1, y1 = box.bottom() + 1;
  const int w = x1 - x0, h = y1 - y0;
  if (p.y == y0 && p.x < x1) return p.x - x0;
  if (p.x == x1 && p.y < y1) return w + (p.y - y0);
  if (p.y == y1 && p.x > x0) return w + h + (x1 - p.x);
  return 2 * w + h + (y1 - p.y);
}

Point ring_at(const BBox& box, int pos) {
  const int x0 = box.x - 1, y0 = box.y - 1, x1 = box.right() + 1, y1 = box.bottom() + 1;
  const int w = x1 - x0, h = y1 - y0;
  if (pos < w) return {x0 + pos, y0};
  pos -= w;
  if (pos < h) return {x1, y0 + pos};
  pos -= h;
  if (pos < w) return {x1 - pos, y1};
  pos -= w;
  return {x0, y1 - pos};
}

}  // namespace netscan
