#include "driftlab/generator.hpp"

#include "driftlab/error.hpp"
#include "driftlab/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace driftlab {
namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

Matrix jacobian(const FunctionFamily& family, std::span<const double> w,
                std::span<const SupportCondition> conditions, std::span<const double> weights) {
  const auto n = static_cast<Eigen::Index>(conditions.size());
  const auto k = static_cast<Eigen::Index>(w.size());
  Matrix J(n, k);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& c = conditions[static_cast<std::size_t>(j)];
    grad_w_deriv_into(family, w, c.x, c.order, {J.row(j).data(), static_cast<std::size_t>(k)});
    J.row(j) *= std::sqrt(weights[static_cast<std::size_t>(c.order)]);
  }
  return J;
}

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

double SupportSchedule::mean_at(std::int64_t t) const {
  const double base_value = drifting == Coordinate::X ? base.x : base.y;
  if (drifting == Coordinate::None || drifts.empty()) return base_value;
  if (t < drifts.front().t0) return drifts.front().a;
  for (std::size_t i = 0; i < drifts.size(); ++i) {
    const auto& d = drifts[i];
    if (t >= d.t0 && t <= d.t1) {
      const double frac = static_cast<double>(t - d.t0) / static_cast<double>(d.t1 - d.t0);
      return d.a + (d.b - d.a) * frac;
    }
    if (i + 1 == drifts.size() || t < drifts[i + 1].t0) return d.b;
  }
  return drifts.back().b;
}

SupportCondition schedule_value(const SupportSchedule& schedule, std::int64_t t, Rng& rng) {
  SupportCondition c = schedule.base;
  if (schedule.drifting == SupportSchedule::Coordinate::None) return c;
  double v = schedule.mean_at(t);
  if (schedule.noise_sigma > 0.0) {
    v += std::normal_distribution<double>(0.0, schedule.noise_sigma)(rng);
  }
  (schedule.drifting == SupportSchedule::Coordinate::X ? c.x : c.y) = v;
  return c;
}

SolveResult solve_support(const FunctionFamily& family,
                          std::span<const SupportCondition> conditions,
                          std::span<const double> weights, const Vector& init,
                          const SolverSettings& settings, const std::string& context) {
  if (conditions.empty()) throw ConfigError("solve_support needs at least one condition");
  if (init.size() != family.param_dim()) {
    throw DimensionError("initial parameter vector has length " + std::to_string(init.size()) +
                         ", expected " + std::to_string(family.param_dim()));
  }
  const std::string where = context.empty() ? std::string() : context + ": ";
  const auto n = static_cast<Eigen::Index>(conditions.size());
  const auto k = init.size();

  SolveResult out{init, 0.0, 0};
  Vector r = residuals(family, as_span(out.w), conditions, weights);
  if (!all_finite(r)) throw NumericFailure(where + "non-finite residual at initial point");
  double cost = r.squaredNorm();
  double lambda = settings.damping_init;
  constexpr double kLambdaMax = 1e16;
  constexpr double kLambdaMin = 1e-15;

  Matrix A(n + k, k);
  Vector rhs(n + k);
  while (out.iterations < settings.max_iters && std::sqrt(cost) >= settings.residual_tol) {
    ++out.iterations;
    const Matrix J = jacobian(family, as_span(out.w), conditions, weights);
    if (!J.allFinite()) throw NumericFailure(where + "non-finite Jacobian");

    bool accepted = false;
    Vector step;
    while (lambda <= kLambdaMax) {
      // Damped step as the least-squares solution of [J; sqrt(lambda) I] d = [-r; 0],
      // which avoids squaring the condition number of J.
      A.topRows(n) = J;
      A.bottomRows(k) = Matrix::Identity(k, k) * std::sqrt(lambda);
      rhs.head(n) = -r;
      rhs.tail(k).setZero();
      step = A.colPivHouseholderQr().solve(rhs);
      const Vector trial = out.w + step;
      const Vector r_trial = residuals(family, as_span(trial), conditions, weights);
      const double cost_trial = r_trial.squaredNorm();
      if (all_finite(step) && std::isfinite(cost_trial) && cost_trial < cost) {
        out.w = trial;
        r = r_trial;
        cost = cost_trial;
        lambda = std::max(lambda / 10.0, kLambdaMin);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) break;  // no descent direction left: local minimum
    if (step.norm() <= 1e-15 * (out.w.norm() + 1e-15)) break;
  }
  if (!out.w.allFinite()) throw NumericFailure(where + "non-finite parameters");
  out.residual_norm = std::sqrt(cost);
  return out;
}

ProcessCurveDataset generate(const DatasetSpec& spec) {
  spec.validate();
  const auto& family = spec.family;
  const int k = family.param_dim();
  const auto weights = spec.effective_weights();
  const std::int64_t T = spec.T;
  const int m = spec.grid.m;

  ProcessCurveDataset ds;
  ds.spec = spec;
  ds.ground_truth = spec.ground_truth();
  ds.curves.resize(T, m);
  ds.sample_grids.resize(T, m);
  ds.latents.resize(T, k);
  ds.residual_norms.assign(static_cast<std::size_t>(T), 0.0);

  Vector w_init(k);
  {
    Rng rng = make_rng(spec.seed, streams::kSolverInit);
    std::normal_distribution<double> perturb(0.0, 0.1);
    for (int i = 0; i < k; ++i) w_init[i] = perturb(rng);
  }

  // Executions are independent given their starting point, so without warm
  // start they may run on several threads.
  auto run_execution = [&](std::int64_t t, const Vector& start) {
    Rng rng = make_rng(spec.seed, streams::kExecution, static_cast<std::uint64_t>(t));
    std::vector<SupportCondition> conditions;
    conditions.reserve(spec.schedules.size());
    for (const auto& s : spec.schedules) conditions.push_back(schedule_value(s, t, rng));

    const std::string ctx = "execution t=" + std::to_string(t);
    const SolveResult sol = solve_support(family, conditions, weights, start, spec.solver, ctx);

    const auto row = static_cast<Eigen::Index>(t - 1);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (int j = 0; j < m; ++j) {
      double x = spec.grid.x0 + static_cast<double>(j + 1) * spec.grid.dx;
      if (spec.noise.sigma_x > 0.0) x += spec.noise.sigma_x * unit(rng);
      ds.sample_grids(row, j) = x;
    }
    auto curve = ds.curves.row(row);
    evaluate_curve(family, as_span(sol.w),
                   {ds.sample_grids.row(row).data(), static_cast<std::size_t>(m)},
                   {curve.data(), static_cast<std::size_t>(m)});
    double sigma_y = spec.noise.sigma_y;
    if (spec.noise.sigma_y_relative) sigma_y *= curve.maxCoeff() - curve.minCoeff();
    if (sigma_y > 0.0) {
      for (int j = 0; j < m; ++j) curve[j] += sigma_y * unit(rng);
    }
    if (!curve.allFinite()) throw GenerationError(ctx + ": curve contains non-finite values");
    ds.latents.row(row) = sol.w.transpose();
    ds.residual_norms[static_cast<std::size_t>(t - 1)] = sol.residual_norm;
    return sol.w;
  };

  if (spec.solver.warm_start) {
    Vector start = w_init;
    for (std::int64_t t = 1; t <= T; ++t) start = run_execution(t, start);
  } else {
    parallel_for(static_cast<std::size_t>(T), spec.workers,
                 [&](std::size_t i) { run_execution(static_cast<std::int64_t>(i) + 1, w_init); });
  }
  return ds;
}

void DatasetSpec::validate() const {
  if (T < 1) throw ConfigError("T must be at least 1");
  if (grid.m < 2) throw ConfigError("grid.m must be at least 2");
  if (!(grid.dx > 0.0)) throw ConfigError("grid.dx must be positive");
  if (!(noise.sigma_x >= 0.0) || !(noise.sigma_y >= 0.0)) {
    throw ConfigError("noise sigmas must be non-negative");
  }
  if (family.max_order < 2) throw ConfigError("family max_order must be at least 2");
  if (family.kind == FunctionFamily::Kind::Polynomial && family.degree < 0) {
    throw ConfigError("polynomial degree must be non-negative");
  }
  if (schedules.empty()) throw ConfigError("at least one support schedule is required");
  if (weights.size() > static_cast<std::size_t>(family.max_order) + 1) {
    throw ConfigError("more order weights than derivative orders");
  }
  for (double d : weights) {
    if (!(d > 0.0)) throw ConfigError("order weights must be strictly positive");
  }
  if (solver.max_iters < 1) throw ConfigError("solver.max_iters must be positive");
  if (!(solver.residual_tol > 0.0)) throw ConfigError("solver.residual_tol must be positive");
  if (!(solver.damping_init > 0.0)) throw ConfigError("solver.damping_init must be positive");
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    const auto& s = schedules[i];
    const std::string where = "schedule " + std::to_string(i) + ": ";
    if (s.base.order < 0 || s.base.order > family.max_order) {
      throw ConfigError(where + "order " + std::to_string(s.base.order) +
                        " exceeds family max_order");
    }
    if (!(s.noise_sigma >= 0.0)) throw ConfigError(where + "noise_sigma must be non-negative");
    if (!s.drifts.empty() && s.drifting == SupportSchedule::Coordinate::None) {
      throw ConfigError(where + "drifts given but no drifting coordinate");
    }
    for (std::size_t j = 0; j < s.drifts.size(); ++j) {
      const auto& d = s.drifts[j];
      if (!(1 <= d.t0 && d.t0 < d.t1 && d.t1 <= T)) {
        throw ConfigError(where + "drift needs 1 <= t0 < t1 <= T");
      }
      if (j > 0 && d.t0 <= s.drifts[j - 1].t1) {
        throw ConfigError(where + "drifts must be sorted and disjoint");
      }
    }
  }
}

std::vector<double> DatasetSpec::effective_weights() const {
  std::vector<double> w(static_cast<std::size_t>(family.max_order) + 1, 1.0);
  std::copy(weights.begin(), weights.end(), w.begin());
  return w;
}

GroundTruth DatasetSpec::ground_truth() const {
  std::vector<Interval> segs;
  for (const auto& s : schedules) {
    for (const auto& d : s.drifts) segs.push_back({d.t0, d.t1});
  }
  return GroundTruth(T, std::move(segs));
}

}  // namespace driftlab
