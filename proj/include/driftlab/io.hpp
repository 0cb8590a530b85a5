#pragma once

#include "driftlab/detectors.hpp"
#include "driftlab/generator.hpp"
#include "driftlab/ground_truth.hpp"
#include "driftlab/metrics.hpp"
#include "driftlab/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace driftlab::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---- numbers ---------------------------------------------------------------

/// Locale-independent, 17 significant digits ("-inf" for negative infinity).
std::string format_double(double v);
/// Strict parse of a full token; throws IoError on trailing garbage.
double parse_double(std::string_view token);

// ---- plain files -------------------------------------------------------------

std::string read_text(const fs::path& path);
/// Writes atomically enough for our purposes: truncate + write + check.
void write_text(const fs::path& path, std::string_view content);

/// Comma-separated rows, no header.
void write_matrix_csv(const fs::path& path, const Matrix& m);
Matrix read_matrix_csv(const fs::path& path);

/// One decimal per line.
void write_scores_csv(const fs::path& path, const ScoreSeries& s);
ScoreSeries read_scores_csv(const fs::path& path);

/// Little-endian binary: "DRIFTBIN", u32 version, u32 rows, u32 cols, then
/// rows * cols f64 values row by row.
void write_packed(const fs::path& path, const Matrix& m);
Matrix read_packed(const fs::path& path);
inline constexpr std::uint32_t kPackedVersion = 1;

/// fpr,value rows with a header line.
void write_curve_csv(const fs::path& path, const ThresholdCurve& curve);

// ---- JSON schemas ------------------------------------------------------------

json to_json(const FunctionFamily& f);
FunctionFamily family_from_json(const json& j);

json to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const json& j);

json to_json(const DatasetSpec& spec);
DatasetSpec dataset_spec_from_json(const json& j);

json to_json(const AETrainSpec& ae);
json to_json(const DetectorSpec& spec);
DetectorSpec detector_spec_from_json(const json& j);

json to_json(const MetricReport& r);

/// Parses JSON text, converting parse errors into IoError mentioning `what`.
json parse_json(std::string_view text, const std::string& what);
json read_json(const fs::path& path);

// ---- dataset directories -----------------------------------------------------

enum class DatasetFormat { Csv, Packed };

/// Writes curves, grid, latents, ground_truth.json and spec.json into `dir`.
/// `dir` is created if missing, but its parent must exist.
void write_dataset(const fs::path& dir, const ProcessCurveDataset& ds,
                   DatasetFormat format = DatasetFormat::Csv);

/// Reads a dataset directory in either format; checks shapes for consistency.
ProcessCurveDataset read_dataset(const fs::path& dir);

}  // namespace driftlab::io
