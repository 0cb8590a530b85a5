#include "driftlab/detectors.hpp"

#include "driftlab/error.hpp"
#include "driftlab/kmeans.hpp"
#include "driftlab/rng.hpp"
#include "driftlab/stats.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace driftlab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_rolling(int window, std::int64_t T) {
  if (window < 2) throw ConfigError("rolling window must be at least 2");
  if (window > T) {
    throw ConfigError("rolling window " + std::to_string(window) + " exceeds T=" + std::to_string(T));
  }
}

void check_pair(int ref, int obs, int gap, std::int64_t T) {
  if (ref < 2 || obs < 2) throw ConfigError("reference and observation windows must be at least 2");
  if (gap < 0) throw ConfigError("window offset must be non-negative");
  if (static_cast<std::int64_t>(ref) + gap + obs > T) {
    throw ConfigError("windows " + std::to_string(ref) + "+" + std::to_string(gap) + "+" +
                      std::to_string(obs) + " exceed T=" + std::to_string(T));
  }
}

std::vector<double> row_means(const Matrix& m) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index t = 0; t < m.rows(); ++t) out[static_cast<std::size_t>(t)] = m.row(t).mean();
  return out;
}

std::vector<double> aggregate(const Matrix& latents, detector::LatentAggregation agg) {
  std::vector<double> out(static_cast<std::size_t>(latents.rows()));
  for (Eigen::Index t = 0; t < latents.rows(); ++t) {
    out[static_cast<std::size_t>(t)] =
        agg == detector::LatentAggregation::Mean ? latents.row(t).mean() : latents.row(t).maxCoeff();
  }
  return out;
}

std::string windows(int ref, int obs, int gap) {
  std::ostringstream os;
  os << "(" << ref << "," << obs << "," << gap << ")";
  return os.str();
}

}  // namespace

std::vector<double> rolling_mean_max(const Matrix& curves, int window) {
  const Matrix rm = rolling_mean(curves, window);
  std::vector<double> out(static_cast<std::size_t>(curves.rows()), 0.0);
  for (Eigen::Index t = first_valid_row(window); t < rm.rows(); ++t) {
    out[static_cast<std::size_t>(t)] = rm.row(t).maxCoeff();
  }
  return out;
}

std::string kind_name(const DetectorKind& kind) {
  return std::visit(
      Overloaded{
          [](const detector::RollingMeanDifference&) { return std::string("RollingMeanDifference"); },
          [](const detector::RollingMeanStdDev&) { return std::string("RollingMeanStdDev"); },
          [](const detector::SlidingKSWIN&) { return std::string("SlidingKSWIN"); },
          [](const detector::Cluster&) { return std::string("Cluster"); },
          [](const detector::AEMeanKS&) { return std::string("AEMeanKS"); },
          [](const detector::AEMMD&) { return std::string("AEMMD"); },
          [](const detector::RandomGuess&) { return std::string("RandomGuess"); },
          [](const detector::Always&) { return std::string("Always"); },
          [](const detector::Never&) { return std::string("Never"); },
      },
      kind);
}

std::string DetectorSpec::name() const {
  if (!label.empty()) return label;
  return std::visit(
      Overloaded{
          [](const detector::RollingMeanDifference& d) {
            return "RollingMeanDifference(" + std::to_string(d.window) + ")";
          },
          [](const detector::RollingMeanStdDev& d) {
            return "RollingMeanStdDev(" + std::to_string(d.window) + ")";
          },
          [](const detector::SlidingKSWIN& d) { return "SlidingKSWIN" + windows(d.ref, d.obs, d.gap); },
          [](const detector::Cluster& d) { return "Cluster(" + std::to_string(d.n_clusters) + ")"; },
          [](const detector::AEMeanKS& d) {
            const char* agg = d.aggregation == detector::LatentAggregation::Mean ? "mean" : "max";
            return "AE(" + std::to_string(d.ae.latent_dim) + ")-" + agg + "-KS" +
                   windows(d.ref, d.obs, d.gap);
          },
          [](const detector::AEMMD& d) {
            return "AE(" + std::to_string(d.ae.latent_dim) + ")-MMD" + windows(d.ref, d.obs, d.gap);
          },
          [](const detector::RandomGuess&) { return std::string("RandomGuess"); },
          [](const detector::Always&) { return std::string("Always"); },
          [](const detector::Never&) { return std::string("Never"); },
      },
      kind);
}

void DetectorSpec::validate() const {
  std::visit(Overloaded{
                 [](const detector::RollingMeanDifference& d) {
                   if (d.window < 2) throw ConfigError("RollingMeanDifference window must be at least 2");
                 },
                 [](const detector::RollingMeanStdDev& d) {
                   if (d.window < 2) throw ConfigError("RollingMeanStdDev window must be at least 2");
                 },
                 [](const detector::SlidingKSWIN& d) { check_pair(d.ref, d.obs, d.gap, d.ref + d.obs + d.gap); },
                 [](const detector::Cluster& d) {
                   if (d.n_clusters < 1) throw ConfigError("Cluster needs at least one cluster");
                 },
                 [](const detector::AEMeanKS& d) {
                   check_pair(d.ref, d.obs, d.gap, d.ref + d.obs + d.gap);
                   d.ae.validate();
                 },
                 [](const detector::AEMMD& d) {
                   check_pair(d.ref, d.obs, d.gap, d.ref + d.obs + d.gap);
                   d.ae.validate();
                 },
                 [](const auto&) {},
             },
             kind);
}

DetectorSpec DetectorSpec::reseeded(std::uint64_t salt) const {
  DetectorSpec out = *this;
  std::visit(Overloaded{
                 [&](detector::Cluster& d) { d.seed = mix64(d.seed ^ mix64(salt)); },
                 [&](detector::AEMeanKS& d) { d.ae.seed = mix64(d.ae.seed ^ mix64(salt)); },
                 [&](detector::AEMMD& d) { d.ae.seed = mix64(d.ae.seed ^ mix64(salt)); },
                 [&](detector::RandomGuess& d) { d.seed = mix64(d.seed ^ mix64(salt)); },
                 [](auto&) {},
             },
             out.kind);
  return out;
}

ScoreSeries score(const DetectorSpec& spec, const CurveView& data) {
  spec.validate();
  const std::int64_t T = data.T();
  if (T < 1) throw InputError("dataset has no curves");
  const auto n = static_cast<std::size_t>(T);

  return std::visit(
      Overloaded{
          [&](const detector::RollingMeanDifference& d) {
            check_rolling(d.window, T);
            const auto a = rolling_mean_max(data.curves, d.window);
            ScoreSeries s(n, 0.0);
            for (std::size_t t = static_cast<std::size_t>(d.window); t < n; ++t) s[t] = std::abs(a[t] - a[t - 1]);
            return s;
          },
          [&](const detector::RollingMeanStdDev& d) {
            check_rolling(d.window, T);
            if (2 * static_cast<std::int64_t>(d.window) - 1 > T) {
              throw ConfigError("RollingMeanStdDev needs T >= 2*window-1");
            }
            const auto a = rolling_mean_max(data.curves, d.window);
            const std::span<const double> valid(a.data() + d.window - 1, n - static_cast<std::size_t>(d.window) + 1);
            const auto sd = rolling_std(valid, d.window);
            ScoreSeries s(n, 0.0);
            std::copy(sd.begin(), sd.end(), s.begin() + d.window - 1);
            return s;
          },
          [&](const detector::SlidingKSWIN& d) {
            check_pair(d.ref, d.obs, d.gap, T);
            return kswin_score(row_means(data.curves), d.ref, d.obs, d.gap);
          },
          [&](const detector::Cluster& d) {
            if (d.n_clusters > T) throw ConfigError("Cluster n_c exceeds T");
            const auto fit = kmeans_fit(data.curves, d.n_clusters, d.seed);
            return kmeans_score(data.curves, fit.centers);
          },
          [&](const detector::AEMeanKS& d) {
            check_pair(d.ref, d.obs, d.gap, T);
            const AEModel model = ae_train(data.curves, d.ae);
            return kswin_score(aggregate(ae_encode(model, data.curves), d.aggregation), d.ref, d.obs, d.gap);
          },
          [&](const detector::AEMMD& d) {
            check_pair(d.ref, d.obs, d.gap, T);
            const AEModel model = ae_train(data.curves, d.ae);
            return mmd_window_score(ae_encode(model, data.curves), d.ref, d.obs, d.gap);
          },
          [&](const detector::RandomGuess& d) {
            Rng rng = make_rng(d.seed, streams::kRandomGuess);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            ScoreSeries s(n);
            for (auto& v : s) v = unit(rng);
            return s;
          },
          [&](const detector::Always&) { return ScoreSeries(n, 1.0); },
          [&](const detector::Never&) {
            return ScoreSeries(n, -std::numeric_limits<double>::infinity());
          },
      },
      spec.kind);
}

ScoreSeries score(const DetectorSpec& spec, const ProcessCurveDataset& dataset) {
  return score(spec, CurveView{dataset.curves, dataset.sample_grids});
}

}  // namespace driftlab
