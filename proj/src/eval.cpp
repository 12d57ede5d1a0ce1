#include "netscan/eval.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace netscan {

int max_error_count(const Netlist& golden) {
  return static_cast<int>(golden.devices().size() + golden.nets().size() + golden.port_count());
}

NedResult ned(const Netlist& golden, const Netlist& candidate, const GedOptions& options) {
  NedResult r;
  r.denominator = max_error_count(golden);
  if (r.denominator == 0) throw GraphError("golden netlist is empty; NED undefined");
  // Edit script reads as "repair the candidate into the golden circuit".
  r.ged = ged(netlist_to_graph(candidate), netlist_to_graph(golden), options);
  r.cost = r.ged.cost;
  r.value = static_cast<double>(r.cost) / r.denominator;
  return r;
}

std::vector<HistogramBucket> make_histogram(const std::vector<double>& values, double width) {
  std::vector<HistogramBucket> buckets;
  buckets.push_back({0.0, 0.0, 0});
  const int steps = static_cast<int>(std::lround(1.0 / width));
  for (int i = 0; i < steps; ++i) buckets.push_back({i * width, (i + 1) * width, 0});
  buckets.back().hi = 1.0;
  buckets.push_back({1.0, std::numeric_limits<double>::infinity(), 0});
  for (double v : values) {
    if (v <= 0.0) {
      ++buckets.front().count;
    } else if (v > 1.0) {
      ++buckets.back().count;
    } else {
      int k = static_cast<int>(std::ceil(v / width - 1e-9));
      k = std::clamp(k, 1, steps);
      ++buckets[k].count;
    }
  }
  return buckets;
}

EvalReport summarize(std::vector<CaseResult> cases, double bucket_width) {
  EvalReport report;
  report.cases = std::move(cases);
  std::vector<double> values;
  int successes = 0;
  double sum = 0.0;
  for (const auto& c : report.cases) {
    values.push_back(c.ned);
    sum += c.ned;
    if (c.success()) ++successes;
  }
  if (!report.cases.empty()) {
    report.mean_ned = sum / static_cast<double>(report.cases.size());
    report.success_rate = static_cast<double>(successes) / static_cast<double>(report.cases.size());
  }
  report.histogram = make_histogram(values, bucket_width);
  return report;
}

EvalReport batch_evaluate(const std::vector<EvalCase>& cases, const GedOptions& options,
                          int workers, double bucket_width) {
  std::vector<CaseResult> results(cases.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      const auto& c = cases[i];
      const NedResult r = ned(c.golden, c.candidate, options);
      results[i] = {c.id,       r.cost,  r.denominator, r.ged.optimal,
                    r.value,    std::chrono::duration<double, std::milli>(r.ged.elapsed).count()};
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(cases.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(work);
  }
  return summarize(std::move(results), bucket_width);
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["cases"] = nlohmann::ordered_json::array();
  for (const auto& c : report.cases) {
    nlohmann::ordered_json jc;
    jc["id"] = c.id;
    jc["cost"] = c.cost;
    jc["optimal"] = c.optimal;
    jc["ned"] = c.ned;
    jc["elapsed_ms"] = c.elapsed_ms;
    doc["cases"].push_back(std::move(jc));
  }
  doc["mean_ned"] = report.mean_ned;
  doc["success_rate"] = report.success_rate;
  return doc.dump(2);
}

std::string histogram_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "bucket_lo,bucket_hi,count\n";
  for (const auto& b : report.histogram) {
    out << b.lo << ',';
    if (std::isinf(b.hi)) {
      out << "inf";
    } else {
      out << b.hi;
    }
    out << ',' << b.count << '\n';
  }
  return out.str();
}

}  // namespace netscan
