#include "driftlab/cli.hpp"

#include "driftlab/bench.hpp"
#include "driftlab/detectors.hpp"
#include "driftlab/error.hpp"
#include "driftlab/generator.hpp"
#include "driftlab/io.hpp"
#include "driftlab/metrics.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>

namespace driftlab {
namespace {

namespace fs = std::filesystem;
using io::json;

struct GenerateArgs {
  std::vector<std::string> positionals;
  std::string preset_name;
  double scale = 1.0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::string format = "csv";
  std::optional<int> workers;
};

struct DetectArgs {
  std::string dataset_dir;
  std::string detector_path;
  std::string scores_path;
};

struct ScoreArgs {
  std::string gt_path;
  std::string scores_path;
  std::string report_path;
  std::string ols_curve;
  std::string sols_curve;
  std::string roc_curve;
};

struct BenchArgs {
  std::string spec_path;
  std::string out_dir;
  std::optional<int> workers;
};

// "a.b=v" sets /a/b; v is taken as JSON when it parses, otherwise as a string.
void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  std::string pointer;
  std::stringstream ks(key);
  for (std::string part; std::getline(ks, part, '.');) {
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    pointer += "/" + part;
  }
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  const json::json_pointer ptr(pointer);
  if (!j.contains(ptr.parent_pointer())) throw ConfigError("override key '" + key + "' does not exist");
  j[ptr] = value;
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  std::string spec_path;
  std::string out_dir;
  if (a.positionals.size() == 2) {
    spec_path = a.positionals[0];
    out_dir = a.positionals[1];
  } else if (a.positionals.size() == 1) {
    out_dir = a.positionals[0];
  } else {
    throw ConfigError("generate expects [spec.json] out_dir");
  }
  if (spec_path.empty() == a.preset_name.empty()) {
    throw ConfigError("generate needs exactly one of a spec file or --preset");
  }
  const auto format = a.format == "csv"      ? io::DatasetFormat::Csv
                      : a.format == "packed" ? io::DatasetFormat::Packed
                                             : throw ConfigError("--format must be csv or packed");

  DatasetSpec spec = spec_path.empty() ? preset(a.preset_name, a.scale, a.seed.value_or(0))
                                       : io::dataset_spec_from_json(io::read_json(spec_path));
  if (!spec_path.empty() && a.seed) spec.seed = *a.seed;
  if (!a.overrides.empty()) {
    json j = io::to_json(spec);
    j["workers"] = spec.workers;
    for (const auto& o : a.overrides) apply_override(j, o);
    spec = io::dataset_spec_from_json(j);
  }
  if (a.workers) spec.workers = *a.workers;

  const fs::path dir(out_dir);
  const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) throw IoError("parent directory " + parent.string() + " does not exist");

  const ProcessCurveDataset ds = generate(spec);
  io::write_dataset(dir, ds, format);
  const double max_res =
      ds.residual_norms.empty() ? 0.0 : *std::max_element(ds.residual_norms.begin(), ds.residual_norms.end());
  out << "T=" << ds.T() << " m=" << ds.m() << " segments=" << ds.ground_truth.k()
      << " max_residual=" << io::format_double(max_res) << "\n";
  return 0;
}

int cmd_detect(const DetectArgs& a, std::ostream& out) {
  const ProcessCurveDataset ds = io::read_dataset(a.dataset_dir);
  const DetectorSpec spec = io::detector_spec_from_json(io::read_json(a.detector_path));
  const ScoreSeries s = score(spec, CurveView{ds.curves, ds.sample_grids});
  io::write_scores_csv(a.scores_path, s);
  out << spec.name() << ": wrote " << s.size() << " scores\n";
  return 0;
}

int cmd_score(const ScoreArgs& a, std::ostream& out) {
  const GroundTruth gt = io::ground_truth_from_json(io::read_json(a.gt_path));
  const ScoreSeries s = io::read_scores_csv(a.scores_path);
  if (static_cast<std::int64_t>(s.size()) != gt.T()) {
    throw DimensionError("scores have " + std::to_string(s.size()) + " entries but the ground truth has T=" +
                         std::to_string(gt.T()));
  }
  if (gt.k() == 0) throw DegenerateGroundTruthError("ground truth has no drift segments; OLS and TPR are undefined");
  if (gt.positives() == gt.T()) {
    throw DegenerateGroundTruthError("ground truth marks every execution as drift; FPR is undefined");
  }
  const MetricReport r = evaluate(gt, s);
  io::write_text(a.report_path, io::to_json(r).dump(2) + "\n");
  if (!a.ols_curve.empty() || !a.sols_curve.empty() || !a.roc_curve.empty()) {
    const SweepCurves c = sweep(gt, s);
    if (!a.ols_curve.empty()) io::write_curve_csv(a.ols_curve, c.ols);
    if (!a.sols_curve.empty()) io::write_curve_csv(a.sols_curve, c.sols);
    if (!a.roc_curve.empty()) io::write_curve_csv(a.roc_curve, c.tpr);
  }
  out << "tauc_trapezoid=" << io::format_double(r.tauc_trapezoid) << " auc=" << io::format_double(r.auc) << "\n";
  return 0;
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  BenchSpec spec = bench_spec_from_json(io::read_json(a.spec_path));
  if (a.workers) spec.workers = *a.workers;
  const fs::path dir(a.out_dir);
  const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) throw IoError("parent directory " + parent.string() + " does not exist");

  const BenchResult result = run_bench(spec);
  for (const auto& f : result.failures) {
    err << "failed: " << f.dataset << " seed " << f.seed << (f.detector.empty() ? "" : " " + f.detector) << ": "
        << f.message << "\n";
  }
  if (result.rows.empty()) throw ConfigError("every benchmark run failed");
  emit_report(result, dir);
  out << result.rows.size() << " runs, " << result.failures.size() << " failures\n";
  for (const auto& c : result.correlations) {
    out << c.dataset << ": pearson(tauc_trap, auc)=" << (c.r ? io::format_double(*c.r) : "undefined") << "\n";
  }
  return result.failures.empty() ? 0 : result.failures.front().exit_code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic process-curve drift datasets and temporal drift-detection metrics", "driftlab"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a dataset from a spec file or a preset");
  g->add_option("args", gen.positionals, "[spec.json] out_dir")->required()->expected(1, 2);
  g->add_option("--preset", gen.preset_name, "Preset name: dataset-1, dataset-2 or dataset-3");
  g->add_option("--scale", gen.scale, "Preset scale in (0, 1]; T is scaled, segment fractions kept");
  g->add_option("--seed", gen.seed, "Random seed (overrides the dataset seed)");
  g->add_option("--set", gen.overrides, "Override a spec field, e.g. --set T=500 --set grid.m=50");
  g->add_option("--format", gen.format, "Curve file format: csv or packed")->check(CLI::IsMember({"csv", "packed"}));
  g->add_option("--workers", gen.workers, "Solver threads when warm start is off");

  DetectArgs det;
  auto* d = app.add_subcommand("detect", "Score every execution of a dataset with one detector");
  d->add_option("dataset_dir", det.dataset_dir, "Dataset directory")->required();
  d->add_option("detector", det.detector_path, "Detector spec JSON")->required();
  d->add_option("scores", det.scores_path, "Output scores.csv")->required();

  ScoreArgs sc;
  auto* s = app.add_subcommand("score", "Compute TAUC, sTAUC and AUC for a score series");
  s->add_option("ground_truth", sc.gt_path, "ground_truth.json")->required();
  s->add_option("scores", sc.scores_path, "scores.csv, one value per line")->required();
  s->add_option("report", sc.report_path, "Output report JSON")->required();
  s->add_option("--ols-curve", sc.ols_curve, "Write the FPR-vs-OLS curve points as CSV");
  s->add_option("--sols-curve", sc.sols_curve, "Write the FPR-vs-sOLS curve points as CSV");
  s->add_option("--roc-curve", sc.roc_curve, "Write the ROC curve points as CSV");

  BenchArgs be;
  auto* b = app.add_subcommand("bench", "Run datasets x seeds x detectors and write a report");
  b->add_option("spec", be.spec_path, "Bench spec JSON")->required();
  b->add_option("out_dir", be.out_dir, "Output directory")->required();
  b->add_option("--workers", be.workers, "Concurrent runs (capped by DRIFTLAB_WORKERS)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << "\n" << "run 'driftlab --help' for usage\n";
    return 2;
  }

  try {
    if (*g) return cmd_generate(gen, out);
    if (*d) return cmd_detect(det, out);
    if (*s) return cmd_score(sc, out);
    if (*b) return cmd_bench(be, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const io::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return 3;
  }
  return 2;
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace driftlab
