#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "netscan/eval.hpp"
#include "netscan/metrics.hpp"
#include "netscan/synth.hpp"
#include "netscan/topology.hpp"

namespace fs = std::filesystem;
using namespace netscan;

namespace {

// Hard errors end the command with exit code 1; diagnostics never do.
struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Failure("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Failure("cannot write " + p.string());
  out << text;
}

// Writes to `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

struct Shared {
  std::string policy = "auto";
  double budget = 60.0;
  int workers = 1;
  std::string debug_dump;
  std::string out;
};

void add_shared(CLI::App* cmd, Shared& s) {
  cmd->add_option("--policy", s.policy, "Jumper policy")
      ->check(CLI::IsMember({"auto", "all", "none"}))
      ->capture_default_str();
  cmd->add_option("--budget", s.budget, "GED budget per case, seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--workers", s.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--debug-dump", s.debug_dump, "Directory for pipeline stage images");
  cmd->add_option("--out", s.out, "Output path");
}

GedOptions ged_options(const Shared& s) {
  GedOptions o;
  o.budget = std::chrono::milliseconds(static_cast<long long>(s.budget * 1000.0));
  return o;
}

ConvertOptions convert_options(const Shared& s, bool light_ink) {
  ConvertOptions o;
  o.mode = *parse_jumper_mode(s.policy);
  o.polarity = light_ink ? Polarity::light_ink : Polarity::dark_ink;
  o.keep_stages = !s.debug_dump.empty();
  return o;
}

void dump_stages(const std::string& dir, const std::string& stem, const ConvertResult& r) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  for (const auto& [name, img] : r.stages) write_png((fs::path(dir) / (stem + "_" + name + ".png")).string(), img);
}

ConvertResult run_convert(const fs::path& image, const fs::path& annotations, const ConvertOptions& opts) {
  const GrayImage img = read_png(image.string());
  return convert(img, OracleDetector(load_annotations(annotations.string())), opts);
}

int cmd_convert(const Shared& s, const std::string& image, const std::string& annotations, bool light_ink) {
  const auto r = run_convert(image, annotations, convert_options(s, light_ink));
  for (const auto& d : r.diagnostics) std::cerr << "diagnostic: " << d << '\n';
  dump_stages(s.debug_dump, fs::path(image).stem().string(), r);
  emit(s.out, serialize_netlist(r.netlist));
  return 0;
}

std::string format_ned(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

int cmd_eval(const Shared& s, const std::string& golden, const std::string& candidate) {
  const Netlist g = parse_netlist(read_file(golden));
  const Netlist c = parse_netlist(read_file(candidate));
  const NedResult r = ned(g, c, ged_options(s));
  std::cout << format_ned(r.value) << '\n'
            << "cost " << r.cost << '\n'
            << "optimal " << (r.ged.optimal ? "true" : "false") << '\n';
  if (!s.out.empty()) {
    CaseResult cr{fs::path(candidate).stem().string(), r.cost, r.denominator, r.ged.optimal, r.value,
                  std::chrono::duration<double, std::milli>(r.ged.elapsed).count()};
    write_file(s.out, report_to_json(summarize({cr})) + "\n");
  }
  return 0;
}

int cmd_bench(const Shared& s, const std::string& dir, std::string histogram, bool light_ink) {
  const auto entries = load_manifest(dir);
  if (entries.empty()) throw Failure("corpus " + dir + " lists no cases");
  const ConvertOptions opts = convert_options(s, light_ink);

  std::vector<EvalCase> cases(entries.size());
  std::vector<std::size_t> diag_counts(entries.size());
  std::vector<std::string> errors(entries.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      const auto& e = entries[i];
      try {
        const auto r = run_convert(fs::path(dir) / e.image, fs::path(dir) / e.annotations, opts);
        cases[i] = {e.id, parse_netlist(read_file(fs::path(dir) / e.golden)), r.netlist};
        diag_counts[i] = r.diagnostics.size();
        dump_stages(s.debug_dump, e.id, r);
      } catch (const std::exception& ex) {
        errors[i] = e.id + ": " + ex.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(s.workers, static_cast<int>(entries.size())));
  {
    std::vector<std::jthread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(work);
    work();
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Failure(e);
  }
  const EvalReport report = batch_evaluate(cases, ged_options(s), s.workers);

  const std::string out = s.out.empty() ? (fs::path(dir) / ("report_" + s.policy + ".json")).string() : s.out;
  if (histogram.empty()) histogram = (fs::path(out).replace_extension("").string() + "_histogram.csv");
  write_file(out, report_to_json(report) + "\n");
  write_file(histogram, histogram_to_csv(report));

  std::size_t diags = 0;
  for (auto d : diag_counts) diags += d;
  std::cout << "cases " << report.cases.size() << '\n'
            << "policy " << s.policy << '\n'
            << "success_rate " << format_ned(report.success_rate) << '\n'
            << "mean_ned " << format_ned(report.mean_ned) << '\n'
            << "diagnostics " << diags << '\n'
            << "report " << out << '\n'
            << "histogram " << histogram << '\n';
  return 0;
}

int cmd_gen(const Shared& s, CorpusOptions opts, const std::string& regime) {
  if (s.out.empty()) throw Failure("gen needs --out <dir>");
  if (opts.min_devices > opts.max_devices) throw Failure("--min-devices exceeds --max-devices");
  if (!regime.empty()) opts.regime = parse_crossing_regime(regime);
  const auto entries = write_corpus(s.out, opts);
  std::map<std::string, int> per_regime;
  for (const auto& e : entries) ++per_regime[std::string(to_string(e.regime))];
  std::cout << "cases " << entries.size() << '\n';
  for (const auto& [r, k] : per_regime) std::cout << r << ' ' << k << '\n';
  return 0;
}

std::vector<LabeledBox> boxes_of(const std::vector<std::string>& files, bool predictions) {
  std::vector<LabeledBox> out;
  for (std::size_t k = 0; k < files.size(); ++k) {
    Annotations a = load_annotations(files[k]);
    if (a.image.empty()) a.image = "#" + std::to_string(k);
    for (auto& b : to_labeled_boxes(a)) {
      if (!predictions) b.confidence = 1.0;
      out.push_back(std::move(b));
    }
  }
  return out;
}

// Label agreement between each gold device and its best-overlapping prediction.
nlohmann::ordered_json class_scores(const std::vector<LabeledBox>& preds, const std::vector<LabeledBox>& golds) {
  std::vector<std::string> p, g;
  for (const auto& gold : golds) {
    double best = 0.0;
    std::string label = "background";
    for (const auto& pred : preds) {
      if (pred.image != gold.image) continue;
      const double v = iou(pred.bbox, gold.bbox);
      if (v >= 0.5 && v > best) {
        best = v;
        label = pred.label;
      }
    }
    p.push_back(label);
    g.push_back(gold.label);
  }
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [label, sc] : accuracy_recall(p, g)) {
    nlohmann::ordered_json j;
    j["tp"] = sc.tp;
    j["fp"] = sc.fp;
    j["fn"] = sc.fn;
    j["accuracy"] = sc.accuracy ? nlohmann::ordered_json(*sc.accuracy) : nlohmann::ordered_json();
    j["recall"] = sc.recall ? nlohmann::ordered_json(*sc.recall) : nlohmann::ordered_json();
    out[label] = j;
  }
  return out;
}

int cmd_detmetrics(const Shared& s, const std::vector<std::string>& pred, const std::vector<std::string>& gold,
                   const std::string& metric) {
  if (pred.size() != gold.size()) throw Failure("--pred and --gold need the same number of files");
  const auto p = boxes_of(pred, true);
  const auto g = boxes_of(gold, false);
  nlohmann::ordered_json doc;
  const bool all = metric == "all";
  if (all || metric == "map50") doc["map50"] = map_at(p, g, 0.5);
  if (all || metric == "map50_95") doc["map50_95"] = map_50_95(p, g);
  if (all || metric == "inside") doc["map_inside"] = map_inside(p, g);
  if (all || metric == "accuracy") doc["classes"] = class_scores(p, g);
  emit(s.out, doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Circuit diagram to netlist conversion and evaluation"};
  app.require_subcommand(1);

  Shared conv_s, eval_s, bench_s, gen_s, det_s;
  std::string image, annotations, golden, candidate, corpus, histogram, regime, metric = "all";
  std::vector<std::string> pred_files, gold_files;
  bool light_ink = false;
  CorpusOptions corpus_opts;

  auto* conv = app.add_subcommand("convert", "Convert a diagram image to a netlist");
  add_shared(conv, conv_s);
  conv->add_option("image", image, "PNG image")->required();
  conv->add_option("--annotations", annotations, "Annotation JSON used as detections")->required();
  conv->add_flag("--light-ink", light_ink, "Image has light strokes on a dark background");

  auto* ev = app.add_subcommand("eval", "Netlist edit distance between two netlists");
  add_shared(ev, eval_s);
  ev->add_option("golden", golden, "Golden netlist JSON")->required();
  ev->add_option("candidate", candidate, "Candidate netlist JSON")->required();

  auto* bench = app.add_subcommand("bench", "Convert and evaluate a whole corpus");
  add_shared(bench, bench_s);
  bench->add_option("corpus", corpus, "Corpus directory with manifest.json")->required();
  bench->add_option("--histogram", histogram, "Histogram CSV path");
  bench->add_flag("--light-ink", light_ink, "Images have light strokes on a dark background");

  auto* gen = app.add_subcommand("gen", "Render a synthetic corpus");
  add_shared(gen, gen_s);
  gen->add_option("--seed", corpus_opts.seed)->capture_default_str();
  gen->add_option("--count", corpus_opts.count)->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--min-devices", corpus_opts.min_devices)->check(CLI::Range(2, 40))->capture_default_str();
  gen->add_option("--max-devices", corpus_opts.max_devices)->check(CLI::Range(2, 40))->capture_default_str();
  gen->add_option("--style", regime, "Crossing regime; cycles through all three when omitted")
      ->check(CLI::IsMember({"bridge_dominant", "dot_flat", "dot_only"}));

  auto* det = app.add_subcommand("detmetrics", "Detection metrics between annotation files");
  add_shared(det, det_s);
  det->add_option("--pred", pred_files, "Predicted annotation files")->required();
  det->add_option("--gold", gold_files, "Gold annotation files, paired with --pred")->required();
  det->add_option("--metric", metric)
      ->check(CLI::IsMember({"all", "map50", "map50_95", "inside", "accuracy"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*conv) return cmd_convert(conv_s, image, annotations, light_ink);
    if (*ev) return cmd_eval(eval_s, golden, candidate);
    if (*bench) return cmd_bench(bench_s, corpus, histogram, light_ink);
    if (*gen) return cmd_gen(gen_s, corpus_opts, regime);
    if (*det) return cmd_detmetrics(det_s, pred_files, gold_files, metric);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
