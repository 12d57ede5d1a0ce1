#include "netscan/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>

namespace netscan {

std::optional<BBox> BBox::clamped(int width, int height) const {
  const int x0 = std::max(x, 0);
  const int y0 = std::max(y, 0);
  const int x1 = std::min(x + w, width);
  const int y1 = std::min(y + h, height);
  if (x1 <= x0 || y1 <= y0) return std::nullopt;
  return BBox{x0, y0, x1 - x0, y1 - y0};
}

std::optional<int> otsu_threshold(const GrayImage& img) {
  std::array<double, 256> hist{};
  for (auto v : img.data()) hist[v] += 1.0;
  const double total = static_cast<double>(img.data().size());
  if (total == 0) return std::nullopt;
  double sum_all = 0;
  for (int i = 0; i < 256; ++i) sum_all += i * hist[i];

  double w0 = 0, sum0 = 0;
  double best = 0;
  int first = -1, last = -1;
  for (int t = 1; t < 256; ++t) {
    w0 += hist[t - 1];
    sum0 += (t - 1) * hist[t - 1];
    const double w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best * (1 + 1e-12)) {
      best = between;
      first = last = t;
    } else if (first >= 0 && between >= best * (1 - 1e-12)) {
      last = t;
    }
  }
  if (first < 0 || best <= 0) return std::nullopt;
  return (first + last) / 2;
}

BinarizeResult binarize(const GrayImage& img, Polarity polarity) {
  GrayImage src = img;
  if (polarity == Polarity::light_ink) {
    for (auto& v : src.data()) v = static_cast<std::uint8_t>(255 - v);
  }
  BinarizeResult r;
  r.image = BinaryImage(img.width(), img.height());
  const auto t = otsu_threshold(src);
  if (!t) {
    r.constant = true;
    return r;
  }
  r.threshold = *t;
  auto in = src.data();
  auto out = r.image.data();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] < *t ? 1 : 0;
  return r;
}

namespace {

// Neighbors in Zhang-Suen order P2..P9: N, NE, E, SE, S, SW, W, NW.
constexpr std::array<int, 8> kDx{0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy{-1, -1, 0, 1, 1, 1, 0, -1};

std::array<int, 8> neighbors(const BinaryImage& img, int x, int y) {
  std::array<int, 8> p{};
  for (int k = 0; k < 8; ++k) p[k] = img.get(x + kDx[k], y + kDy[k]);
  return p;
}

// Yokoi connectivity number for 8-connected foreground; 1 means removing the
// pixel preserves topology.
int yokoi8(const std::array<int, 8>& p) {
  // Reorder to E, NE, N, NW, W, SW, S, SE.
  const std::array<int, 8> x{p[2], p[1], p[0], p[7], p[6], p[5], p[4], p[3]};
  auto inv = [&](int k) { return 1 - x[k % 8]; };
  int n = 0;
  for (int k = 0; k < 8; k += 2) n += inv(k) - inv(k) * inv(k + 1) * inv(k + 2);
  return n;
}

// True when the center's foreground neighbors stay 8-connected through the
// (2r+1)^2 window without the center, so deleting it splits nothing.
bool connected_without(const BinaryImage& img, int x, int y, int r) {
  const int side = 2 * r + 1;
  std::vector<char> seen(static_cast<std::size_t>(side) * side, 0);
  auto idx = [&](int px, int py) { return static_cast<std::size_t>(py - y + r) * side + (px - x + r); };
  auto fg = [&](int px, int py) {
    return std::abs(px - x) <= r && std::abs(py - y) <= r && (px != x || py != y) && img.get(px, py);
  };
  std::vector<std::pair<int, int>> stack;
  for (int k = 0; k < 8 && stack.empty(); ++k) {
    if (fg(x + kDx[k], y + kDy[k])) stack.emplace_back(x + kDx[k], y + kDy[k]);
  }
  if (stack.empty()) return false;
  seen[idx(stack[0].first, stack[0].second)] = 1;
  while (!stack.empty()) {
    const auto [cx, cy] = stack.back();
    stack.pop_back();
    for (int k = 0; k < 8; ++k) {
      const int nx = cx + kDx[k], ny = cy + kDy[k];
      if (!fg(nx, ny) || seen[idx(nx, ny)]) continue;
      seen[idx(nx, ny)] = 1;
      stack.emplace_back(nx, ny);
    }
  }
  for (int k = 0; k < 8; ++k) {
    if (fg(x + kDx[k], y + kDy[k]) && !seen[idx(x + kDx[k], y + kDy[k])]) return false;
  }
  return true;
}

bool in_2x2_block(const BinaryImage& img, int x, int y) {
  for (int oy = -1; oy <= 0; ++oy) {
    for (int ox = -1; ox <= 0; ++ox) {
      if (img.get(x + ox, y + oy) && img.get(x + ox + 1, y + oy) && img.get(x + ox, y + oy + 1) &&
          img.get(x + ox + 1, y + oy + 1)) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

BinaryImage skeletonize(const BinaryImage& input) {
  BinaryImage img = input;
  const int w = img.width(), h = img.height();
  std::vector<std::pair<int, int>> marked;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int step = 0; step < 2; ++step) {
      marked.clear();
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!img(x, y)) continue;
          const auto p = neighbors(img, x, y);
          const int b = p[0] + p[1] + p[2] + p[3] + p[4] + p[5] + p[6] + p[7];
          if (b < 2 || b > 6) continue;
          int a = 0;
          for (int k = 0; k < 8; ++k) a += (p[k] == 0 && p[(k + 1) % 8] == 1);
          if (a != 1) continue;
          const int n = p[0], e = p[2], s = p[4], wv = p[6];
          if (step == 0 ? (n * e * s != 0 || e * s * wv != 0) : (n * e * wv != 0 || n * s * wv != 0)) {
            continue;
          }
          marked.emplace_back(x, y);
        }
      }
      // Deleting the marked set at once can wipe out 2x2 squares and
      // two-pixel diagonals; re-check simplicity against the current state.
      for (auto [x, y] : marked) {
        const auto p = neighbors(img, x, y);
        const int b = p[0] + p[1] + p[2] + p[3] + p[4] + p[5] + p[6] + p[7];
        if (b < 2 || yokoi8(p) != 1) continue;
        img(x, y) = 0;
        changed = true;
      }
    }
  }
  // Zhang-Suen can leave 2x2 clusters at junctions; peel simple pixels
  // there first. Clusters wrapped around one-pixel holes have no simple
  // pixel, so the second pass only keeps foreground connectivity.
  for (int pass = 0; pass < 2; ++pass) {
    changed = true;
    while (changed) {
      changed = false;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!img(x, y) || !in_2x2_block(img, x, y)) continue;
          const auto p = neighbors(img, x, y);
          const int b = p[0] + p[1] + p[2] + p[3] + p[4] + p[5] + p[6] + p[7];
          if (b < 2) continue;
          if (pass == 0 ? yokoi8(p) == 1 : connected_without(img, x, y, 3)) {
            img(x, y) = 0;
            changed = true;
          }
        }
      }
    }
  }
  return img;
}

bool has_2x2_block(const BinaryImage& img) {
  for (int y = 0; y + 1 < img.height(); ++y) {
    for (int x = 0; x + 1 < img.width(); ++x) {
      if (img(x, y) && img(x + 1, y) && img(x, y + 1) && img(x + 1, y + 1)) return true;
    }
  }
  return false;
}

namespace {

BinaryImage paint_boxes(BinaryImage img, std::span<const BBox> boxes, std::uint8_t value) {
  for (const auto& box : boxes) {
    const auto c = box.clamped(img.width(), img.height());
    if (!c) continue;
    for (int y = c->y; y <= c->bottom(); ++y) {
      for (int x = c->x; x <= c->right(); ++x) img(x, y) = value;
    }
  }
  return img;
}

}  // namespace

BinaryImage fill_boxes(BinaryImage img, std::span<const BBox> boxes) {
  return paint_boxes(std::move(img), boxes, 1);
}

BinaryImage erase_boxes(BinaryImage img, std::span<const BBox> boxes) {
  return paint_boxes(std::move(img), boxes, 0);
}

LabelMap label_components(const BinaryImage& img) {
  LabelMap m;
  m.width = img.width();
  m.height = img.height();
  m.labels.assign(img.data().size(), 0);
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (!img(x, y) || m.labels[static_cast<std::size_t>(y) * m.width + x]) continue;
      const int label = ++m.count;
      m.labels[static_cast<std::size_t>(y) * m.width + x] = label;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        for (int k = 0; k < 8; ++k) {
          const int nx = cx + kDx[k], ny = cy + kDy[k];
          if (!img.get(nx, ny)) continue;
          int& slot = m.labels[static_cast<std::size_t>(ny) * m.width + nx];
          if (slot) continue;
          slot = label;
          queue.emplace_back(nx, ny);
        }
      }
    }
  }
  return m;
}

BinaryImage remove_small_components(const BinaryImage& img, double ratio) {
  const LabelMap m = label_components(img);
  if (m.count == 0) return img;
  std::vector<long> size(m.count + 1, 0);
  for (int l : m.labels) {
    if (l) ++size[l];
  }
  const long largest = *std::max_element(size.begin() + 1, size.end());
  BinaryImage out = img;
  auto data = out.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int l = m.labels[i];
    if (l && static_cast<double>(size[l]) < ratio * static_cast<double>(largest)) data[i] = 0;
  }
  return out;
}

GrayImage rgb_to_gray(int width, int height, std::span<const std::uint8_t> rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) {
    throw ImageError("RGB buffer size does not match dimensions");
  }
  GrayImage g(width, height);
  auto out = g.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double y = 0.299 * rgb[3 * i] + 0.587 * rgb[3 * i + 1] + 0.114 * rgb[3 * i + 2];
    out[i] = static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
  }
  return g;
}

GrayImage to_gray(const BinaryImage& img) {
  GrayImage g(img.width(), img.height(), 255);
  auto in = img.data();
  auto out = g.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i]) out[i] = 0;
  }
  return g;
}

}  // namespace netscan
