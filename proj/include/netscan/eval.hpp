#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "netscan/graph.hpp"
#include "netscan/netlist.hpp"

namespace netscan {

// N_device + N_net + N_port of a netlist; each bound port counts once.
int max_error_count(const Netlist& golden);

struct NedResult {
  int cost = 0;
  int denominator = 0;
  double value = 0.0;
  GedResult ged;
};

// GED between the candidate and golden graphs normalized by the golden
// netlist's max error count. Throws GraphError when the golden netlist is
// empty.
NedResult ned(const Netlist& golden, const Netlist& candidate, const GedOptions& options = {});

struct EvalCase {
  std::string id;
  Netlist golden;
  Netlist candidate;
};

struct CaseResult {
  std::string id;
  int cost = 0;
  int denominator = 0;
  bool optimal = false;
  double ned = 0.0;
  double elapsed_ms = 0.0;

  bool success() const { return optimal && cost == 0; }
};

struct HistogramBucket {
  double lo = 0.0;
  double hi = 0.0;  // lo == hi == 0 is the exact-zero bucket; hi = inf for overflow
  int count = 0;
};

struct EvalReport {
  std::vector<CaseResult> cases;
  double mean_ned = 0.0;
  double success_rate = 0.0;
  std::vector<HistogramBucket> histogram;
};

// Buckets [0], (0,w], (w,2w], ..., (1-w,1], (1,inf).
std::vector<HistogramBucket> make_histogram(const std::vector<double>& values, double width = 0.1);

// Evaluates every case (in parallel when workers > 1) and aggregates. Case
// order in the report follows the input order regardless of scheduling.
EvalReport batch_evaluate(const std::vector<EvalCase>& cases, const GedOptions& options,
                          int workers = 1, double bucket_width = 0.1);

// Aggregates precomputed case results.
EvalReport summarize(std::vector<CaseResult> cases, double bucket_width = 0.1);

std::string report_to_json(const EvalReport& report);
std::string histogram_to_csv(const EvalReport& report);

}  // namespace netscan
