#pragma once

#include "driftlab/detectors.hpp"
#include "driftlab/ground_truth.hpp"
#include "driftlab/io.hpp"
#include "driftlab/metrics.hpp"
#include "driftlab/svg.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace driftlab {

struct BenchDataset {
  std::string preset;  // "dataset-1", "dataset-2" or "dataset-3"
  double scale = 0.1;
  std::string name;  // row label; the preset name when empty

  std::string label() const { return name.empty() ? preset : name; }
};

struct BenchSpec {
  std::vector<BenchDataset> datasets;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<DetectorSpec> detectors;
  std::vector<Rule> rules = {Rule::Step, Rule::Trapezoid};
  std::string output_dir;
  int workers = 1;
  /// Off by default; when on, wall_time_ms is filled in.
  bool record_wall_time = false;

  /// Throws ConfigError: no dataset, seed or detector; duplicate labels.
  void validate() const;
};

struct BenchRow {
  std::string dataset;
  std::uint64_t seed = 0;
  std::string detector;
  double tauc_step = 0.0;
  double tauc_trap = 0.0;
  double stauc_step = 0.0;
  double stauc_trap = 0.0;
  double auc = 0.0;
  double wall_time_ms = 0.0;

  bool operator==(const BenchRow&) const = default;
};

struct BenchFailure {
  std::string dataset;
  std::uint64_t seed = 0;
  std::string detector;  // empty when dataset generation failed
  std::string message;
  int exit_code = 2;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single run
};

struct BenchAggregate {
  std::string dataset;
  std::string detector;
  std::size_t runs = 0;
  Summary tauc_step, tauc_trap, stauc_step, stauc_trap, auc;
};

struct BenchCorrelation {
  std::string dataset;
  std::optional<double> r;  // empty when undefined
  std::string note;
};

struct BenchTraces {
  std::string dataset;
  std::uint64_t seed = 0;
  GroundTruth ground_truth;
  std::vector<svg::Trace> traces;
};

struct BenchResult {
  std::vector<BenchRow> rows;  // ordered by dataset, seed, detector as listed
  std::vector<BenchFailure> failures;
  std::vector<BenchAggregate> aggregates;
  std::vector<BenchCorrelation> correlations;
  std::vector<BenchTraces> traces;  // first seed of every dataset
  std::vector<Rule> rules;

  const BenchAggregate* find(const std::string& dataset, const std::string& detector) const;
};

/// Worker budget after applying the DRIFTLAB_WORKERS cap.
int effective_workers(int requested);

BenchResult run_bench(const BenchSpec& spec);

/// Mean and std per (dataset, detector) over successful rows, in first-seen order.
std::vector<BenchAggregate> aggregate(const std::vector<BenchRow>& rows);

/// Pearson r between the per-detector mean TAUC (trapezoid) and mean AUC for
/// one dataset. Throws ConfigError with fewer than 3 detectors or zero variance.
double correlate(const BenchResult& result, const std::string& dataset);
double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// results.csv, summary.csv, correlations.csv, bars_<dataset>.svg and
/// trace_<dataset>.svg (plus failures.csv when any triple failed).
void emit_report(const BenchResult& result, const std::filesystem::path& dir);

inline constexpr const char* kResultsHeader =
    "dataset,seed,detector,tauc_step,tauc_trap,stauc_step,stauc_trap,auc,wall_time_ms";
std::string results_csv(const std::vector<BenchRow>& rows);
std::vector<BenchRow> parse_results_csv(const std::string& text);

io::json to_json(const BenchSpec& spec);
BenchSpec bench_spec_from_json(const io::json& j);

}  // namespace driftlab
