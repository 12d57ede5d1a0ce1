#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netscan/detection.hpp"

namespace netscan {

struct ClassScore {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  // TP / (TP + FP); reported under the name "accuracy". Absent when no prediction has the class.
  std::optional<double> accuracy;
  std::optional<double> recall;  // TP / (TP + FN); absent when no gold has the class
};

// preds[i] is the label predicted for golds[i].
std::map<std::string, ClassScore> accuracy_recall(std::span<const std::string> preds,
                                                  std::span<const std::string> golds);

// A labeled box on a named image; gold boxes ignore confidence.
struct LabeledBox {
  std::string image;
  std::string label;
  BBox bbox;
  double confidence = 1.0;
};

double iou(const BBox& a, const BBox& b);
// Center of `gold` within `pred`, edges included.
bool center_inside(const BBox& gold, const BBox& pred);

// Per-class all-points AP with greedy confidence-descending matching; mean
// over classes present in golds. 0 when golds are empty.
double map_at(std::span<const LabeledBox> preds, std::span<const LabeledBox> golds, double iou_threshold);
// Plain mean of map_at over 0.50, 0.55, ..., 0.95.
double map_50_95(std::span<const LabeledBox> preds, std::span<const LabeledBox> golds);
double map_inside(std::span<const LabeledBox> preds, std::span<const LabeledBox> golds);

// Devices and crossings of an annotation file as labeled boxes.
std::vector<LabeledBox> to_labeled_boxes(const Annotations& a);

}  // namespace netscan
