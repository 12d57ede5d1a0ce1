#include "netscan/metrics.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace netscan {

std::map<std::string, ClassScore> accuracy_recall(std::span<const std::string> preds,
                                                  std::span<const std::string> golds) {
  if (preds.size() != golds.size()) throw std::invalid_argument("accuracy_recall: size mismatch");
  std::map<std::string, ClassScore> out;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == golds[i]) {
      ++out[preds[i]].tp;
    } else {
      ++out[preds[i]].fp;
      ++out[golds[i]].fn;
    }
  }
  for (auto& [label, s] : out) {
    if (s.tp + s.fp > 0) s.accuracy = static_cast<double>(s.tp) / (s.tp + s.fp);
    if (s.tp + s.fn > 0) s.recall = static_cast<double>(s.tp) / (s.tp + s.fn);
  }
  return out;
}

double iou(const BBox& a, const BBox& b) {
  const long ix = std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const long iy = std::max(0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const long inter = ix * iy;
  const long uni = static_cast<long>(a.w) * a.h + static_cast<long>(b.w) * b.h - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

bool center_inside(const BBox& gold, const BBox& pred) {
  // Doubled coordinates keep the half-pixel center exact.
  const long cx = 2L * gold.x + gold.w;
  const long cy = 2L * gold.y + gold.h;
  return cx >= 2L * pred.x && cx <= 2L * (pred.x + pred.w) && cy >= 2L * pred.y &&
         cy <= 2L * (pred.y + pred.h);
}

namespace {

// Match score: higher is better, negative means no match.
using MatchFn = std::function<double(const BBox& gold, const BBox& pred)>;

double average_precision(const std::vector<const LabeledBox*>& preds,
                         const std::vector<const LabeledBox*>& golds, const MatchFn& match) {
  if (golds.empty()) return 0.0;
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a]->confidence > preds[b]->confidence; });
  std::vector<bool> used(golds.size(), false);
  std::vector<double> precision, recall;
  int tp = 0, fp = 0;
  for (std::size_t k : order) {
    const LabeledBox& p = *preds[k];
    int best = -1;
    double best_score = -1;
    for (std::size_t g = 0; g < golds.size(); ++g) {
      if (used[g] || golds[g]->image != p.image) continue;
      const double s = match(golds[g]->bbox, p.bbox);
      if (s >= 0 && s > best_score) {
        best_score = s;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0) {
      used[best] = true;
      ++tp;
    } else {
      ++fp;
    }
    precision.push_back(static_cast<double>(tp) / (tp + fp));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(golds.size()));
  }
  // Precision envelope, then area under the step curve.
  for (int i = static_cast<int>(precision.size()) - 2; i >= 0; --i) {
    precision[i] = std::max(precision[i], precision[i + 1]);
  }
  double ap = 0, prev_recall = 0;
  for (std::size_t i = 0; i < precision.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

double mean_ap(std::span<const LabeledBox> preds, std::span<const LabeledBox> golds, const MatchFn& match) {
  std::set<std::string> classes;
  for (const auto& g : golds) classes.insert(g.label);
  if (classes.empty()) return 0.0;
  double sum = 0;
  for (const auto& c : classes) {
    std::vector<const LabeledBox*> p, g;
    for (const auto& b : preds) {
      if (b.label == c) p.push_back(&b);
    }
    for (const auto& b : golds) {
      if (b.label == c) g.push_back(&b);
    }
    sum += average_precision(p, g, match);
  }
  return sum / static_cast<double>(classes.size());
}

}  // namespace

double map_at(std::span<const LabeledBox> preds, std::span<const LabeledBox> golds, double iou_threshold) {
  return mean_ap(preds, golds, [iou_threshold](const BBox& g, const BBox& p) {
    const double v = iou(g, p);
    return v >= iou_threshold ? v : -1.0;
  });
}

double map_50_95(std::span<const LabeledBox> preds, std::span<const LabeledBox> golds) {
  double sum = 0;
  for (int k = 0; k < 10; ++k) sum += map_at(preds, golds, (50 + 5 * k) / 100.0);
  return sum / 10.0;
}

double map_inside(std::span<const LabeledBox> preds, std::span<const LabeledBox> golds) {
  return mean_ap(preds, golds, [](const BBox& g, const BBox& p) {
    return center_inside(g, p) ? iou(g, p) : -1.0;
  });
}

std::vector<LabeledBox> to_labeled_boxes(const Annotations& a) {
  std::vector<LabeledBox> out;
  for (const auto& d : a.devices) out.push_back({a.image, std::string(to_string(d.label)), d.bbox, d.confidence});
  for (const auto& c : a.crossings) out.push_back({a.image, std::string(to_string(c.style)), c.bbox, c.confidence});
  return out;
}

}  // namespace netscan
