#include "driftlab/bench.hpp"

#include "driftlab/error.hpp"
#include "driftlab/generator.hpp"
#include "driftlab/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <set>

namespace driftlab {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Splits one CSV record, honoring double-quoted fields.
std::vector<std::string> csv_split(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

std::string file_stem(const std::string& label) {
  std::string out;
  for (char c : label) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

Rule rule_from(const std::string& s) {
  if (s == "step") return Rule::Step;
  if (s == "trapezoid") return Rule::Trapezoid;
  throw ConfigError("bench spec: rule must be \"step\" or \"trapezoid\"");
}

}  // namespace

void BenchSpec::validate() const {
  if (datasets.empty()) throw ConfigError("bench spec needs at least one dataset");
  if (seeds.empty()) throw ConfigError("bench spec needs at least one seed");
  if (detectors.empty()) throw ConfigError("bench spec needs at least one detector");
  if (rules.empty()) throw ConfigError("bench spec needs at least one integration rule");
  if (workers < 1) throw ConfigError("bench workers must be at least 1");
  std::set<std::string> names;
  for (const auto& d : datasets) {
    parse_preset(d.preset);
    if (!(d.scale > 0.0) || d.scale > 1.0) throw ConfigError("dataset scale must be in (0, 1]");
    if (!names.insert(d.label()).second) throw ConfigError("duplicate dataset label '" + d.label() + "'");
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("duplicate seeds in bench spec");
  }
  names.clear();
  for (const auto& d : detectors) {
    d.validate();
    if (!names.insert(d.name()).second) throw ConfigError("duplicate detector name '" + d.name() + "'");
  }
}

const BenchAggregate* BenchResult::find(const std::string& dataset, const std::string& detector) const {
  for (const auto& a : aggregates) {
    if (a.dataset == dataset && a.detector == detector) return &a;
  }
  return nullptr;
}

int effective_workers(int requested) {
  int workers = std::max(requested, 1);
  if (const char* env = std::getenv("DRIFTLAB_WORKERS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) workers = std::min<int>(workers, static_cast<int>(cap));
  }
  return workers;
}

BenchResult run_bench(const BenchSpec& spec) {
  spec.validate();
  const int workers = effective_workers(spec.workers);
  const std::size_t n_ds = spec.datasets.size();
  const std::size_t n_seed = spec.seeds.size();
  const std::size_t n_det = spec.detectors.size();

  // Phase 1: one dataset per (dataset, seed).
  std::vector<std::unique_ptr<ProcessCurveDataset>> data(n_ds * n_seed);
  std::vector<std::optional<BenchFailure>> gen_fail(n_ds * n_seed);
  parallel_for(n_ds * n_seed, workers, [&](std::size_t i) {
    const auto& ds = spec.datasets[i / n_seed];
    const auto seed = spec.seeds[i % n_seed];
    try {
      data[i] = std::make_unique<ProcessCurveDataset>(generate(preset(ds.preset, ds.scale, seed)));
    } catch (const Error& e) {
      gen_fail[i] = BenchFailure{ds.label(), seed, "", e.what(), e.exit_code()};
    }
  });

  // Phase 2: every (dataset, seed, detector) triple.
  struct Slot {
    std::optional<BenchRow> row;
    std::optional<BenchFailure> failure;
    ScoreSeries scores;
  };
  std::vector<Slot> slots(n_ds * n_seed * n_det);
  parallel_for(slots.size(), workers, [&](std::size_t i) {
    const std::size_t ds_seed = i / n_det;
    const auto& ds = spec.datasets[ds_seed / n_seed];
    const auto seed = spec.seeds[ds_seed % n_seed];
    const auto& det = spec.detectors[i % n_det];
    if (!data[ds_seed]) return;
    const auto& dataset = *data[ds_seed];
    try {
      const auto start = std::chrono::steady_clock::now();
      ScoreSeries s = score(det.reseeded(seed), CurveView{dataset.curves, dataset.sample_grids});
      const auto stop = std::chrono::steady_clock::now();
      const MetricReport m = evaluate(dataset.ground_truth, s);
      BenchRow row{ds.label(), seed, det.name(), m.tauc_step, m.tauc_trapezoid, m.stauc_step,
                   m.stauc_trapezoid, m.auc, 0.0};
      if (spec.record_wall_time) {
        row.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      }
      slots[i].row = row;
      if (ds_seed % n_seed == 0) slots[i].scores = std::move(s);
    } catch (const Error& e) {
      slots[i].failure = BenchFailure{ds.label(), seed, det.name(), e.what(), e.exit_code()};
    }
  });

  BenchResult result;
  result.rules = spec.rules;
  for (const auto& f : gen_fail) {
    if (f) result.failures.push_back(*f);
  }
  for (auto& slot : slots) {
    if (slot.row) result.rows.push_back(*slot.row);
    if (slot.failure) result.failures.push_back(*slot.failure);
  }
  result.aggregates = aggregate(result.rows);

  for (std::size_t d = 0; d < n_ds; ++d) {
    const auto label = spec.datasets[d].label();
    BenchCorrelation c{label, std::nullopt, ""};
    try {
      c.r = correlate(result, label);
    } catch (const Error& e) {
      c.note = e.what();
    }
    result.correlations.push_back(c);

    const std::size_t first = d * n_seed;
    if (!data[first]) continue;
    BenchTraces tr{label, spec.seeds[0], data[first]->ground_truth, {}};
    for (std::size_t k = 0; k < n_det; ++k) {
      auto& slot = slots[first * n_det + k];
      if (slot.row) tr.traces.push_back({spec.detectors[k].name(), std::move(slot.scores)});
    }
    result.traces.push_back(std::move(tr));
  }
  return result;
}

std::vector<BenchAggregate> aggregate(const std::vector<BenchRow>& rows) {
  std::vector<BenchAggregate> out;
  std::map<std::pair<std::string, std::string>, std::vector<const BenchRow*>> groups;
  for (const auto& r : rows) {
    auto& g = groups[{r.dataset, r.detector}];
    if (g.empty()) out.push_back({r.dataset, r.detector, 0, {}, {}, {}, {}, {}});
    g.push_back(&r);
  }
  for (auto& a : out) {
    const auto& g = groups[{a.dataset, a.detector}];
    auto col = [&](double BenchRow::*field) {
      std::vector<double> v;
      for (const auto* r : g) v.push_back(r->*field);
      return summarize(v);
    };
    a.runs = g.size();
    a.tauc_step = col(&BenchRow::tauc_step);
    a.tauc_trap = col(&BenchRow::tauc_trap);
    a.stauc_step = col(&BenchRow::stauc_step);
    a.stauc_trap = col(&BenchRow::stauc_trap);
    a.auc = col(&BenchRow::auc);
  }
  return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("correlation inputs differ in length");
  if (x.size() < 2) throw ConfigError("correlation needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw ConfigError("correlation is undefined: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double correlate(const BenchResult& result, const std::string& dataset) {
  std::vector<double> tauc, auc;
  for (const auto& a : result.aggregates) {
    if (a.dataset != dataset) continue;
    tauc.push_back(a.tauc_trap.mean);
    auc.push_back(a.auc.mean);
  }
  if (tauc.size() < 3) {
    throw ConfigError("correlation for " + dataset + " needs at least 3 detectors, have " +
                      std::to_string(tauc.size()));
  }
  return pearson(tauc, auc);
}

std::string results_csv(const std::vector<BenchRow>& rows) {
  using io::format_double;
  std::string out = std::string(kResultsHeader) + "\n";
  for (const auto& r : rows) {
    out += csv_field(r.dataset) + "," + std::to_string(r.seed) + "," + csv_field(r.detector) + "," +
           format_double(r.tauc_step) + "," + format_double(r.tauc_trap) + "," + format_double(r.stauc_step) +
           "," + format_double(r.stauc_trap) + "," + format_double(r.auc) + "," +
           format_double(r.wall_time_ms) + "\n";
  }
  return out;
}

std::vector<BenchRow> parse_results_csv(const std::string& text) {
  std::vector<BenchRow> rows;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != kResultsHeader) throw IoError("results.csv: unexpected header");
      header = false;
      continue;
    }
    const auto f = csv_split(line);
    if (f.size() != 9) throw IoError("results.csv: expected 9 fields, got " + std::to_string(f.size()));
    BenchRow r;
    r.dataset = f[0];
    try {
      r.seed = std::stoull(f[1]);
    } catch (const std::exception&) {
      throw IoError("results.csv: bad seed '" + f[1] + "'");
    }
    r.detector = f[2];
    r.tauc_step = io::parse_double(f[3]);
    r.tauc_trap = io::parse_double(f[4]);
    r.stauc_step = io::parse_double(f[5]);
    r.stauc_trap = io::parse_double(f[6]);
    r.auc = io::parse_double(f[7]);
    r.wall_time_ms = io::parse_double(f[8]);
    rows.push_back(std::move(r));
  }
  if (header) throw IoError("results.csv: missing header");
  return rows;
}

void emit_report(const BenchResult& result, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  using io::format_double;
  if (result.rows.empty() || result.aggregates.empty()) {
    throw ConfigError("cannot emit a report without results");
  }
  const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
  if (!fs::exists(parent)) throw IoError("parent directory " + parent.string() + " does not exist");
  std::error_code ec;
  fs::create_directory(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

  io::write_text(dir / "results.csv", results_csv(result.rows));

  std::string summary =
      "dataset,detector,runs,tauc_step_mean,tauc_step_std,tauc_trap_mean,tauc_trap_std,"
      "stauc_step_mean,stauc_step_std,stauc_trap_mean,stauc_trap_std,auc_mean,auc_std\n";
  for (const auto& a : result.aggregates) {
    summary += csv_field(a.dataset) + "," + csv_field(a.detector) + "," + std::to_string(a.runs);
    for (const Summary* s : {&a.tauc_step, &a.tauc_trap, &a.stauc_step, &a.stauc_trap, &a.auc}) {
      summary += "," + format_double(s->mean) + "," + format_double(s->std);
    }
    summary += "\n";
  }
  io::write_text(dir / "summary.csv", summary);

  std::string corr = "dataset,pearson_tauc_trap_auc,note\n";
  for (const auto& c : result.correlations) {
    corr += csv_field(c.dataset) + "," + (c.r ? format_double(*c.r) : std::string("nan")) + "," +
            csv_field(c.note) + "\n";
  }
  io::write_text(dir / "correlations.csv", corr);

  if (!result.failures.empty()) {
    std::string fail = "dataset,seed,detector,exit_code,message\n";
    for (const auto& f : result.failures) {
      fail += csv_field(f.dataset) + "," + std::to_string(f.seed) + "," + csv_field(f.detector) + "," +
              std::to_string(f.exit_code) + "," + csv_field(f.message) + "\n";
    }
    io::write_text(dir / "failures.csv", fail);
  }

  std::vector<std::string> datasets;
  for (const auto& a : result.aggregates) {
    if (std::find(datasets.begin(), datasets.end(), a.dataset) == datasets.end()) datasets.push_back(a.dataset);
  }
  const std::vector<Rule> rules = result.rules.empty() ? std::vector<Rule>{Rule::Trapezoid} : result.rules;
  for (const auto& ds : datasets) {
    std::vector<std::string> detectors;
    std::vector<svg::BarSeries> series;
    for (Rule rule : rules) {
      series.push_back({"TAUC (" + to_string(rule) + ")", {}, {}, rule == Rule::Step ? "#9ecae1" : "#1f77b4"});
    }
    series.push_back({"AUC", {}, {}, "#ff7f0e"});
    for (const auto& a : result.aggregates) {
      if (a.dataset != ds) continue;
      detectors.push_back(a.detector);
      for (std::size_t r = 0; r < rules.size(); ++r) {
        const Summary& s = rules[r] == Rule::Step ? a.tauc_step : a.tauc_trap;
        series[r].values.push_back(s.mean);
        series[r].errors.push_back(s.std);
      }
      series.back().values.push_back(a.auc.mean);
      series.back().errors.push_back(a.auc.std);
    }
    io::write_text(dir / ("bars_" + file_stem(ds) + ".svg"),
                   svg::bar_chart("Mean TAUC and AUC on " + ds, detectors, series));
  }
  for (const auto& tr : result.traces) {
    io::write_text(dir / ("trace_" + file_stem(tr.dataset) + ".svg"),
                   svg::trace_plot("Scores on " + tr.dataset + " (seed " + std::to_string(tr.seed) + ")",
                                   tr.traces, tr.ground_truth));
  }
}

io::json to_json(const BenchSpec& spec) {
  io::json datasets = io::json::array();
  for (const auto& d : spec.datasets) {
    io::json j = {{"preset", d.preset}, {"scale", d.scale}};
    if (!d.name.empty()) j["name"] = d.name;
    datasets.push_back(j);
  }
  io::json detectors = io::json::array();
  for (const auto& d : spec.detectors) detectors.push_back(io::to_json(d));
  io::json rules = io::json::array();
  for (Rule r : spec.rules) rules.push_back(to_string(r));
  io::json j = {{"datasets", datasets},
                {"seeds", spec.seeds},
                {"detectors", detectors},
                {"rules", rules},
                {"workers", spec.workers},
                {"record_wall_time", spec.record_wall_time}};
  if (!spec.output_dir.empty()) j["output_dir"] = spec.output_dir;
  return j;
}

BenchSpec bench_spec_from_json(const io::json& j) {
  if (!j.is_object()) throw ConfigError("bench spec must be a JSON object");
  BenchSpec spec;
  try {
    if (!j.contains("datasets") || !j.at("datasets").is_array()) {
      throw ConfigError("bench spec: 'datasets' must be an array");
    }
    for (const auto& d : j.at("datasets")) {
      BenchDataset ds;
      if (d.is_string()) {
        ds.preset = d.get<std::string>();
      } else {
        ds.preset = d.at("preset").get<std::string>();
        ds.scale = d.value("scale", ds.scale);
        ds.name = d.value("name", std::string());
      }
      spec.datasets.push_back(ds);
    }
    if (j.contains("seeds")) spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (!j.contains("detectors") || !j.at("detectors").is_array()) {
      throw ConfigError("bench spec: 'detectors' must be an array");
    }
    for (const auto& d : j.at("detectors")) spec.detectors.push_back(io::detector_spec_from_json(d));
    if (j.contains("rules")) {
      spec.rules.clear();
      for (const auto& r : j.at("rules")) spec.rules.push_back(rule_from(r.get<std::string>()));
    }
    spec.output_dir = j.value("output_dir", std::string());
    spec.workers = j.value("workers", spec.workers);
    spec.record_wall_time = j.value("record_wall_time", spec.record_wall_time);
  } catch (const io::json::exception& e) {
    throw ConfigError(std::string("bench spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace driftlab
