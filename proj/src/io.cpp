#include "driftlab/io.hpp"

#include "driftlab/error.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace driftlab::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "packed dataset I/O assumes a little-endian host");

constexpr std::array<char, 8> kMagic = {'D', 'R', 'I', 'F', 'T', 'B', 'I', 'N'};

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Non-empty lines of a text file, without line terminators.
std::vector<std::string_view> lines_of(const std::string& text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

template <class T>
T get_required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return get_required<T>(j, key, where);
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
}

std::string coordinate_name(SupportSchedule::Coordinate c) {
  switch (c) {
    case SupportSchedule::Coordinate::X: return "x";
    case SupportSchedule::Coordinate::Y: return "y";
    case SupportSchedule::Coordinate::None: return "none";
  }
  return "none";
}

SupportSchedule::Coordinate coordinate_from(const std::string& s, const std::string& where) {
  if (s == "x") return SupportSchedule::Coordinate::X;
  if (s == "y") return SupportSchedule::Coordinate::Y;
  if (s == "none") return SupportSchedule::Coordinate::None;
  throw ConfigError(where + ": drifting coordinate must be \"x\", \"y\" or \"none\"");
}

AETrainSpec ae_from_json(const json& j, int latent_dim, const std::string& where) {
  AETrainSpec ae;
  ae.latent_dim = latent_dim;
  if (j.is_null()) return ae;
  require_object(j, where);
  ae.latent_dim = get_or<int>(j, "latent_dim", latent_dim, where);
  ae.hidden_width = get_or<int>(j, "hidden_width", ae.hidden_width, where);
  ae.epochs = get_or<int>(j, "epochs", ae.epochs, where);
  ae.batch_size = get_or<int>(j, "batch_size", ae.batch_size, where);
  ae.learning_rate = get_or<double>(j, "learning_rate", ae.learning_rate, where);
  ae.seed = get_or<std::uint64_t>(j, "seed", ae.seed, where);
  return ae;
}

}  // namespace

// ---- numbers ---------------------------------------------------------------

std::string format_double(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view token) {
  token = trim(token);
  if (token.empty()) throw IoError("empty numeric field");
  // from_chars rejects a leading '+'.
  if (token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw IoError("not a number: '" + std::string(token) + "'");
  }
  return v;
}

// ---- plain files -------------------------------------------------------------

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 24);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  write_text(path, out);
}

Matrix read_matrix_csv(const fs::path& path) {
  const std::string text = read_text(path);
  const auto lines = lines_of(text);
  if (lines.empty()) return Matrix(0, 0);
  const auto cols = split(lines.front(), ',').size();
  Matrix m(static_cast<Eigen::Index>(lines.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != cols) {
      throw IoError(path.filename().string() + ": row " + std::to_string(i + 1) + " has " +
                    std::to_string(fields.size()) + " columns, expected " + std::to_string(cols));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(fields[j]);
    }
  }
  return m;
}

void write_scores_csv(const fs::path& path, const ScoreSeries& s) {
  std::string out;
  out.reserve(s.size() * 24);
  for (double v : s) {
    out += format_double(v);
    out += '\n';
  }
  write_text(path, out);
}

ScoreSeries read_scores_csv(const fs::path& path) {
  const std::string text = read_text(path);
  ScoreSeries s;
  std::size_t line_no = 0;
  for (auto line : lines_of(text)) {
    ++line_no;
    const double v = parse_double(line);
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw IoError(path.filename().string() + ": line " + std::to_string(line_no) +
                    " is NaN or +inf");
    }
    s.push_back(v);
  }
  return s;
}

void write_packed(const fs::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const std::uint32_t header[3] = {kPackedVersion, static_cast<std::uint32_t>(m.rows()),
                                   static_cast<std::uint32_t>(m.cols())};
  out.write(kMagic.data(), kMagic.size());
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  // Row-major buffer, written as is.
  out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!out) throw IoError("write failed for " + path.string());
}

Matrix read_packed(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<char, 8> magic{};
  std::uint32_t header[3] = {};
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || magic != kMagic) throw IoError(path.string() + " is not a packed dataset file");
  if (header[0] != kPackedVersion) {
    throw IoError(path.string() + ": unsupported packed version " + std::to_string(header[0]));
  }
  Matrix m(header[1], header[2]);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!in) throw IoError(path.string() + " is truncated");
  return m;
}

void write_curve_csv(const fs::path& path, const ThresholdCurve& curve) {
  std::string out = "fpr," + to_string(curve.kind) + "\n";
  for (const auto& p : curve.points) out += format_double(p.fpr) + "," + format_double(p.value) + "\n";
  write_text(path, out);
}

// ---- JSON schemas ------------------------------------------------------------

json to_json(const FunctionFamily& f) {
  json j;
  if (f.kind == FunctionFamily::Kind::Polynomial) {
    j = {{"kind", "polynomial"}, {"degree", f.degree}};
  } else {
    j = {{"kind", "sine_product"}};
  }
  if (f.max_order != 3) j["max_order"] = f.max_order;
  return j;
}

FunctionFamily family_from_json(const json& j) {
  const std::string where = "family";
  require_object(j, where);
  const auto kind = get_required<std::string>(j, "kind", where);
  const int max_order = get_or<int>(j, "max_order", 3, where);
  if (kind == "polynomial") return FunctionFamily::polynomial(get_required<int>(j, "degree", where), max_order);
  if (kind == "sine_product") return FunctionFamily::sine_product(max_order);
  throw ConfigError("family: unknown kind '" + kind + "'");
}

json to_json(const GroundTruth& gt) {
  json segs = json::array();
  for (const auto& s : gt.segments()) segs.push_back({s.lo, s.hi});
  return {{"T", gt.T()}, {"segments", segs}};
}

GroundTruth ground_truth_from_json(const json& j) {
  const std::string where = "ground truth";
  require_object(j, where);
  const auto T = get_required<std::int64_t>(j, "T", where);
  const auto raw = get_required<json>(j, "segments", where);
  if (!raw.is_array()) throw ConfigError(where + ": segments must be an array");
  std::vector<Interval> segs;
  for (const auto& s : raw) {
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer()) {
      throw ConfigError(where + ": each segment must be [lo, hi] with integer bounds");
    }
    segs.push_back({s[0].get<std::int64_t>(), s[1].get<std::int64_t>()});
  }
  return GroundTruth(T, std::move(segs));
}

json to_json(const DatasetSpec& spec) {
  json schedules = json::array();
  for (const auto& s : spec.schedules) {
    json drifts = json::array();
    for (const auto& d : s.drifts) drifts.push_back({{"t0", d.t0}, {"t1", d.t1}, {"a", d.a}, {"b", d.b}});
    schedules.push_back({{"order", s.base.order},
                         {"x", s.base.x},
                         {"y", s.base.y},
                         {"drifting", coordinate_name(s.drifting)},
                         {"drifts", drifts},
                         {"noise_sigma", s.noise_sigma}});
  }
  return {
      {"family", to_json(spec.family)},
      {"schedules", schedules},
      {"weights", spec.effective_weights()},
      {"T", spec.T},
      {"grid", {{"x0", spec.grid.x0}, {"dx", spec.grid.dx}, {"m", spec.grid.m}}},
      {"noise",
       {{"sigma_x", spec.noise.sigma_x},
        {"sigma_y", spec.noise.sigma_y},
        {"sigma_y_relative", spec.noise.sigma_y_relative}}},
      {"seed", spec.seed},
      {"solver",
       {{"max_iters", spec.solver.max_iters},
        {"residual_tol", spec.solver.residual_tol},
        {"damping_init", spec.solver.damping_init},
        {"warm_start", spec.solver.warm_start}}},
  };
}

DatasetSpec dataset_spec_from_json(const json& j) {
  const std::string where = "dataset spec";
  require_object(j, where);
  DatasetSpec spec;
  spec.family = family_from_json(get_required<json>(j, "family", where));
  spec.T = get_required<std::int64_t>(j, "T", where);
  spec.seed = get_or<std::uint64_t>(j, "seed", 0, where);
  spec.weights = get_or<std::vector<double>>(j, "weights", {}, where);
  spec.workers = get_or<int>(j, "workers", 1, where);

  const auto grid = get_required<json>(j, "grid", where);
  require_object(grid, "grid");
  spec.grid.x0 = get_or<double>(grid, "x0", 0.0, "grid");
  spec.grid.dx = get_required<double>(grid, "dx", "grid");
  spec.grid.m = get_required<int>(grid, "m", "grid");

  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    require_object(n, "noise");
    spec.noise.sigma_x = get_or<double>(n, "sigma_x", spec.noise.sigma_x, "noise");
    spec.noise.sigma_y = get_or<double>(n, "sigma_y", spec.noise.sigma_y, "noise");
    spec.noise.sigma_y_relative = get_or<bool>(n, "sigma_y_relative", spec.noise.sigma_y_relative, "noise");
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    require_object(s, "solver");
    spec.solver.max_iters = get_or<int>(s, "max_iters", spec.solver.max_iters, "solver");
    spec.solver.residual_tol = get_or<double>(s, "residual_tol", spec.solver.residual_tol, "solver");
    spec.solver.damping_init = get_or<double>(s, "damping_init", spec.solver.damping_init, "solver");
    spec.solver.warm_start = get_or<bool>(s, "warm_start", spec.solver.warm_start, "solver");
  }

  const auto schedules = get_required<json>(j, "schedules", where);
  if (!schedules.is_array()) throw ConfigError(where + ": schedules must be an array");
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    const auto& sj = schedules[i];
    const std::string sw = "schedule " + std::to_string(i);
    require_object(sj, sw);
    SupportSchedule s;
    s.base.order = get_required<int>(sj, "order", sw);
    s.base.x = get_required<double>(sj, "x", sw);
    s.base.y = get_required<double>(sj, "y", sw);
    s.drifting = coordinate_from(get_or<std::string>(sj, "drifting", "none", sw), sw);
    s.noise_sigma = get_or<double>(sj, "noise_sigma", 0.0, sw);
    if (sj.contains("drifts")) {
      if (!sj.at("drifts").is_array()) throw ConfigError(sw + ": drifts must be an array");
      for (const auto& dj : sj.at("drifts")) {
        require_object(dj, sw + " drift");
        s.drifts.push_back({get_required<std::int64_t>(dj, "t0", sw), get_required<std::int64_t>(dj, "t1", sw),
                            get_required<double>(dj, "a", sw), get_required<double>(dj, "b", sw)});
      }
    }
    spec.schedules.push_back(std::move(s));
  }
  spec.validate();
  return spec;
}

json to_json(const AETrainSpec& ae) {
  return {{"latent_dim", ae.latent_dim},  {"hidden_width", ae.hidden_width},
          {"epochs", ae.epochs},          {"batch_size", ae.batch_size},
          {"learning_rate", ae.learning_rate}, {"seed", ae.seed}};
}

json to_json(const DetectorSpec& spec) {
  json j = {{"kind", kind_name(spec.kind)}};
  if (!spec.label.empty()) j["label"] = spec.label;
  std::visit(
      [&](const auto& d) {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, detector::RollingMeanDifference> ||
                      std::is_same_v<D, detector::RollingMeanStdDev>) {
          j["m_r"] = d.window;
        } else if constexpr (std::is_same_v<D, detector::SlidingKSWIN>) {
          j["m_r"] = d.ref;
          j["m_o"] = d.obs;
          j["delta"] = d.gap;
        } else if constexpr (std::is_same_v<D, detector::Cluster>) {
          j["n_c"] = d.n_clusters;
          j["seed"] = d.seed;
        } else if constexpr (std::is_same_v<D, detector::AEMeanKS> || std::is_same_v<D, detector::AEMMD>) {
          j["k"] = d.ae.latent_dim;
          j["m_r"] = d.ref;
          j["m_o"] = d.obs;
          j["delta"] = d.gap;
          j["ae"] = to_json(d.ae);
          if constexpr (std::is_same_v<D, detector::AEMeanKS>) {
            j["aggregation"] = d.aggregation == detector::LatentAggregation::Mean ? "mean" : "max";
          }
        } else if constexpr (std::is_same_v<D, detector::RandomGuess>) {
          j["seed"] = d.seed;
        }
      },
      spec.kind);
  return j;
}

DetectorSpec detector_spec_from_json(const json& j) {
  const std::string where = "detector spec";
  require_object(j, where);
  const auto kind = get_required<std::string>(j, "kind", where);
  DetectorSpec spec;
  spec.label = get_or<std::string>(j, "label", "", where);
  const std::string w = where + " (" + kind + ")";
  if (kind == "RollingMeanDifference") {
    spec.kind = detector::RollingMeanDifference{get_required<int>(j, "m_r", w)};
  } else if (kind == "RollingMeanStdDev") {
    spec.kind = detector::RollingMeanStdDev{get_required<int>(j, "m_r", w)};
  } else if (kind == "SlidingKSWIN") {
    spec.kind = detector::SlidingKSWIN{get_required<int>(j, "m_r", w), get_required<int>(j, "m_o", w),
                                       get_or<int>(j, "delta", 0, w)};
  } else if (kind == "Cluster") {
    spec.kind = detector::Cluster{get_required<int>(j, "n_c", w), get_or<std::uint64_t>(j, "seed", 0, w)};
  } else if (kind == "AEMeanKS" || kind == "AEMMD") {
    const int k = get_required<int>(j, "k", w);
    const AETrainSpec ae = ae_from_json(j.contains("ae") ? j.at("ae") : json(), k, w + " ae");
    if (ae.latent_dim != k) throw ConfigError(w + ": k and ae.latent_dim disagree");
    const int ref = get_required<int>(j, "m_r", w);
    const int obs = get_required<int>(j, "m_o", w);
    const int gap = get_or<int>(j, "delta", 0, w);
    if (kind == "AEMMD") {
      spec.kind = detector::AEMMD{ref, obs, gap, ae};
    } else {
      const auto agg = get_or<std::string>(j, "aggregation", "mean", w);
      if (agg != "mean" && agg != "max") throw ConfigError(w + ": aggregation must be \"mean\" or \"max\"");
      spec.kind = detector::AEMeanKS{ref, obs, gap, ae,
                                     agg == "mean" ? detector::LatentAggregation::Mean
                                                   : detector::LatentAggregation::Max};
    }
  } else if (kind == "RandomGuess") {
    spec.kind = detector::RandomGuess{get_or<std::uint64_t>(j, "seed", 0, w)};
  } else if (kind == "Always") {
    spec.kind = detector::Always{};
  } else if (kind == "Never") {
    spec.kind = detector::Never{};
  } else {
    throw ConfigError(where + ": unknown kind '" + kind + "'");
  }
  spec.validate();
  return spec;
}

json to_json(const MetricReport& r) {
  return {{"tauc_step", r.tauc_step},
          {"tauc_trapezoid", r.tauc_trapezoid},
          {"stauc_step", r.stauc_step},
          {"stauc_trapezoid", r.stauc_trapezoid},
          {"auc", r.auc}};
}

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(what + " is not valid JSON: " + e.what());
  }
}

json read_json(const fs::path& path) { return parse_json(read_text(path), path.string()); }

// ---- dataset directories -----------------------------------------------------

void write_dataset(const fs::path& dir, const ProcessCurveDataset& ds, DatasetFormat format) {
  const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
  if (!fs::exists(parent)) throw IoError("parent directory " + parent.string() + " does not exist");
  std::error_code ec;
  fs::create_directory(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

  if (format == DatasetFormat::Packed) {
    write_packed(dir / "curves.bin", ds.curves);
    write_packed(dir / "grid.bin", ds.sample_grids);
  } else {
    write_matrix_csv(dir / "curves.csv", ds.curves);
    write_matrix_csv(dir / "grid.csv", ds.sample_grids);
  }
  write_matrix_csv(dir / "latents.csv", ds.latents);
  write_text(dir / "ground_truth.json", to_json(ds.ground_truth).dump(2) + "\n");
  write_text(dir / "spec.json", to_json(ds.spec).dump(2) + "\n");
}

ProcessCurveDataset read_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a dataset directory");
  ProcessCurveDataset ds;
  if (fs::exists(dir / "curves.bin")) {
    ds.curves = read_packed(dir / "curves.bin");
    ds.sample_grids = read_packed(dir / "grid.bin");
  } else {
    ds.curves = read_matrix_csv(dir / "curves.csv");
    ds.sample_grids = read_matrix_csv(dir / "grid.csv");
  }
  ds.latents = read_matrix_csv(dir / "latents.csv");
  ds.ground_truth = ground_truth_from_json(read_json(dir / "ground_truth.json"));
  if (fs::exists(dir / "spec.json")) ds.spec = dataset_spec_from_json(read_json(dir / "spec.json"));

  const auto T = ds.curves.rows();
  if (T == 0) throw IoError(dir.string() + ": no curves");
  if (ds.sample_grids.rows() != T || ds.sample_grids.cols() != ds.curves.cols()) {
    throw IoError(dir.string() + ": grid shape does not match curves");
  }
  if (ds.latents.rows() != T) throw IoError(dir.string() + ": latents row count does not match curves");
  if (ds.ground_truth.T() != T) throw IoError(dir.string() + ": ground truth T does not match curves");
  if (!ds.curves.allFinite()) throw IoError(dir.string() + ": curves contain non-finite values");
  ds.residual_norms.assign(static_cast<std::size_t>(T), 0.0);
  return ds;
}

}  // namespace driftlab::io
