#include <cstdlib>
#include <random>
#include <set>

#include "doctest.h"
#include "netscan/raster.hpp"

using namespace netscan;

namespace {

BinaryImage from_rows(const std::vector<std::string>& rows) {
  BinaryImage b(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) b(x, y) = rows[y][x] == '#';
  }
  return b;
}

int ink(const BinaryImage& b) {
  int n = 0;
  for (auto v : b.data()) n += v;
  return n;
}

// Brute-force between-class variance over all 256 cut points.
int otsu_oracle(const GrayImage& g) {
  double best = -1;
  std::vector<int> argmax;
  for (int t = 1; t < 256; ++t) {
    double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (auto v : g.data()) {
      if (v < t) {
        ++n0;
        s0 += v;
      } else {
        ++n1;
        s1 += v;
      }
    }
    if (n0 == 0 || n1 == 0) continue;
    const double d = s0 / n0 - s1 / n1;
    const double var = n0 * n1 * d * d;
    if (var > best * (1 + 1e-12)) {
      best = var;
      argmax = {t};
    } else if (var >= best * (1 - 1e-12)) {
      argmax.push_back(t);
    }
  }
  return (argmax.front() + argmax.back()) / 2;
}

// Union-find component count oracle, 8-connectivity.
int count_components(const BinaryImage& b) {
  const int w = b.width(), h = b.height();
  std::vector<int> parent(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!b(x, y)) continue;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (b.get(x + dx, y + dy)) parent[find(y * w + x)] = find((y + dy) * w + x + dx);
        }
      }
    }
  }
  std::set<int> roots;
  for (int i = 0; i < w * h; ++i) {
    if (b.data()[i]) roots.insert(find(i));
  }
  return static_cast<int>(roots.size());
}

}  // namespace

TEST_CASE("otsu on a two-level image") {
  GrayImage g(10, 10, 255);
  for (int i = 0; i < 50; ++i) g.data()[i] = 0;
  const auto t = otsu_threshold(g);
  REQUIRE(t.has_value());
  CHECK(*t == otsu_oracle(g));
  CHECK(*t == 128);
  const auto r = binarize(g);
  CHECK_FALSE(r.constant);
  CHECK(ink(r.image) == 50);
  CHECK(r.image.data()[0] == 1);
  CHECK(r.image.data()[99] == 0);
}

TEST_CASE("otsu matches exhaustive scan on random histograms") {
  std::mt19937 rng(4);
  for (int i = 0; i < 30; ++i) {
    GrayImage g(16, 16);
    std::uniform_int_distribution<int> dist(0, 255);
    for (auto& v : g.data()) v = static_cast<std::uint8_t>(dist(rng));
    CHECK(otsu_threshold(g).value() == otsu_oracle(g));
  }
}

TEST_CASE("constant image has no threshold") {
  const auto r = binarize(GrayImage(8, 8, 255));
  CHECK(r.constant);
  CHECK(ink(r.image) == 0);
  CHECK(binarize(GrayImage(8, 8, 0)).constant);
}

TEST_CASE("polarity symmetry") {
  std::mt19937 rng(8);
  GrayImage g(20, 20), inv(20, 20);
  for (std::size_t i = 0; i < g.data().size(); ++i) {
    g.data()[i] = static_cast<std::uint8_t>(rng() % 256);
    inv.data()[i] = static_cast<std::uint8_t>(255 - g.data()[i]);
  }
  CHECK(binarize(g).image == binarize(inv, Polarity::light_ink).image);
}

TEST_CASE("thinning a thick bar") {
  BinaryImage b(30, 9);
  for (int y = 3; y <= 5; ++y) {
    for (int x = 5; x <= 24; ++x) b(x, y) = 1;
  }
  const auto s = skeletonize(b);
  CHECK_FALSE(has_2x2_block(s));
  int min_x = 100, max_x = -1;
  for (int x = 0; x < s.width(); ++x) {
    int per_column = 0;
    for (int y = 0; y < s.height(); ++y) {
      if (!s(x, y)) continue;
      CHECK(std::abs(y - 4) <= 1);
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      ++per_column;
    }
    CHECK(per_column <= 1);
  }
  CHECK(min_x <= 6);
  CHECK(max_x >= 23);
  CHECK(count_components(s) == 1);
}

TEST_CASE("thinning leaves thin lines alone") {
  const auto line = from_rows({
      "..........",
      ".########.",
      "........#.",
      "........#.",
      "..........",
  });
  CHECK(skeletonize(line) == line);
  const auto diag = from_rows({
      "#....",
      ".#...",
      "..#..",
      "...#.",
  });
  CHECK(skeletonize(diag) == diag);
}

TEST_CASE("thinning a solid square") {
  BinaryImage b(13, 13);
  for (int y = 2; y < 11; ++y) {
    for (int x = 2; x < 11; ++x) b(x, y) = 1;
  }
  const auto s = skeletonize(b);
  CHECK(ink(s) > 0);
  CHECK_FALSE(has_2x2_block(s));
  CHECK(count_components(s) == 1);
}

TEST_CASE("blocks wrapped in tiny loops are still thinned") {
  // Every block pixel has a diagonal arm; the arms meet again two pixels out.
  const auto knot = from_rows({
      "..........",
      "..#.......",
      "..##..#...",
      "..#.##....",
      "..#.##....",
      "..##..#...",
      ".#....#...",
      "..........",
  });
  const auto s = skeletonize(knot);
  CHECK_FALSE(has_2x2_block(s));
  CHECK(count_components(s) == count_components(knot));
  // Two diagonals crossing cannot lose the block without splitting an arm.
  const auto cross = from_rows({
      "#....#",
      ".#..#.",
      "..##..",
      "..##..",
      ".#..#.",
      "#....#",
  });
  CHECK(count_components(skeletonize(cross)) == 1);
}

TEST_CASE("thinning properties on random blobs") {
  std::mt19937 rng(21);
  for (int i = 0; i < 40; ++i) {
    BinaryImage b(24, 24);
    for (int k = 0; k < 5; ++k) {
      const int x = rng() % 20, y = rng() % 20, w = 1 + rng() % 8, h = 1 + rng() % 8;
      for (int yy = y; yy < std::min(24, y + h); ++yy) {
        for (int xx = x; xx < std::min(24, x + w); ++xx) b(xx, yy) = 1;
      }
    }
    const auto s = skeletonize(b);
    CHECK_FALSE(has_2x2_block(s));
    CHECK(count_components(s) == count_components(b));
    for (std::size_t p = 0; p < s.data().size(); ++p) {
      if (s.data()[p]) CHECK(b.data()[p] == 1);
    }
    CHECK(skeletonize(s) == s);
  }
}

TEST_CASE("fill and erase boxes") {
  BinaryImage zero(10, 10);
  CHECK(fill_boxes(zero, {}) == zero);
  const std::vector<BBox> whole{{0, 0, 10, 10}};
  CHECK(ink(fill_boxes(zero, whole)) == 100);
  const std::vector<BBox> two{{1, 1, 4, 4}, {3, 3, 4, 4}};
  const auto f = fill_boxes(zero, two);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      CHECK(f(x, y) == (two[0].contains({x, y}) || two[1].contains({x, y})));
    }
  }
  CHECK(erase_boxes(f, two) == zero);
  CHECK(erase_boxes(f, {}) == f);
  const std::vector<BBox> outside{{-5, -5, 7, 7}, {50, 50, 3, 3}};
  CHECK(ink(fill_boxes(zero, outside)) == 4);
}

TEST_CASE("erasing a box splits a line") {
  BinaryImage b(20, 5);
  for (int x = 0; x < 20; ++x) b(x, 2) = 1;
  const std::vector<BBox> box{{8, 0, 4, 5}};
  CHECK(label_components(b).count == 1);
  CHECK(label_components(erase_boxes(b, box)).count == 2);
}

TEST_CASE("component labeling") {
  CHECK(label_components(BinaryImage(5, 5)).count == 0);
  const auto dots = from_rows({
      "#...",
      "....",
      "...#",
  });
  const auto m = label_components(dots);
  CHECK(m.count == 2);
  CHECK(m.at(0, 0) == 1);
  CHECK(m.at(3, 2) == 2);
  const auto chain = from_rows({
      "#...",
      ".#..",
      "..#.",
      "...#",
  });
  CHECK(label_components(chain).count == 1);
  std::mt19937 rng(2);
  for (int i = 0; i < 30; ++i) {
    BinaryImage r(15, 15);
    for (auto& v : r.data()) v = rng() % 3 == 0;
    CHECK(label_components(r).count == count_components(r));
  }
}

TEST_CASE("small component removal") {
  auto make = [](std::vector<int> sizes) {
    BinaryImage b(120, 2 * static_cast<int>(sizes.size()));
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      for (int x = 0; x < sizes[i]; ++x) b(x, static_cast<int>(2 * i)) = 1;
    }
    return b;
  };
  const auto out = remove_small_components(make({100, 9, 11}));
  CHECK(ink(out) == 111);
  CHECK(label_components(out).count == 2);
  CHECK(out == remove_small_components(out));
  const auto boundary = make({100, 10});
  CHECK(remove_small_components(boundary) == boundary);
  const auto single = make({7});
  CHECK(remove_small_components(single) == single);
  CHECK(ink(remove_small_components(BinaryImage(4, 4))) == 0);
}

TEST_CASE("png round trip") {
  GrayImage g(17, 9);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 17; ++x) g(x, y) = static_cast<std::uint8_t>((x * 15 + y * 7) % 256);
  }
  const auto bytes = encode_png(g);
  CHECK(decode_png(bytes) == g);
  const std::vector<std::uint8_t> junk{1, 2, 3, 4};
  CHECK_THROWS_AS(decode_png(junk), ImageError);
  CHECK_THROWS_AS(read_png("/nonexistent/file.png"), ImageError);
}

TEST_CASE("rgb luma") {
  const std::vector<std::uint8_t> rgb{255, 0, 0, 0, 255, 0, 0, 0, 255, 255, 255, 255};
  const auto g = rgb_to_gray(4, 1, rgb);
  CHECK(g(0, 0) == 76);
  CHECK(g(1, 0) == 150);
  CHECK(g(2, 0) == 29);
  CHECK(g(3, 0) == 255);
}
