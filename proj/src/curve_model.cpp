#include "driftlab/curve_model.hpp"

#include "driftlab/error.hpp"

#include <cmath>
#include <numbers>

namespace driftlab {
namespace {

void check(const FunctionFamily& family, std::span<const double> w, int order) {
  if (order < 0 || order > family.max_order) {
    throw UnsupportedOrderError("derivative order " + std::to_string(order) +
                                " not supported by " + family.name() + " (max_order " +
                                std::to_string(family.max_order) + ")");
  }
  if (static_cast<int>(w.size()) != family.param_dim()) {
    throw DimensionError("parameter vector has length " + std::to_string(w.size()) +
                         ", " + family.name() + " expects " +
                         std::to_string(family.param_dim()));
  }
}

// i! / (i - r)!, zero when r > i.
double falling_factorial(int i, int r) {
  if (r > i) return 0.0;
  double v = 1.0;
  for (int j = 0; j < r; ++j) v *= static_cast<double>(i - j);
  return v;
}

// n-th derivative of sin evaluated at u: sin(u + n pi / 2).
double sin_deriv(double u, int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return std::sin(u);
    case 1: return std::cos(u);
    case 2: return -std::sin(u);
    default: return -std::cos(u);
  }
}

// n-th x-derivative of g(x) = x sin(pi x - phase), and its phase derivative.
// Leibniz: g^(n) = n pi^(n-1) sin^(n-1)(u) + x pi^n sin^(n)(u).
struct SineTerm {
  double value;
  double d_phase;
};

SineTerm sine_term(double x, double phase, int n) {
  constexpr double pi = std::numbers::pi;
  const double u = pi * x - phase;
  const double pn = std::pow(pi, n);
  double value = x * pn * sin_deriv(u, n);
  double d_phase = -x * pn * sin_deriv(u, n + 1);
  if (n > 0) {
    const double pn1 = std::pow(pi, n - 1);
    value += n * pn1 * sin_deriv(u, n - 1);
    d_phase += -n * pn1 * sin_deriv(u, n);
  }
  return {value, d_phase};
}

// x-derivative of the linear term w_2 x, divided by w_2.
double linear_term(double x, int n) {
  if (n == 0) return x;
  if (n == 1) return 1.0;
  return 0.0;
}

}  // namespace

FunctionFamily FunctionFamily::polynomial(int degree, int max_order) {
  if (degree < 0) throw ConfigError("polynomial degree must be non-negative");
  if (max_order < 2) throw ConfigError("max_order must be at least 2");
  return {Kind::Polynomial, degree, max_order};
}

FunctionFamily FunctionFamily::sine_product(int max_order) {
  if (max_order < 2) throw ConfigError("max_order must be at least 2");
  return {Kind::SineProduct, 0, max_order};
}

std::string FunctionFamily::name() const {
  if (kind == Kind::Polynomial) return "polynomial(" + std::to_string(degree) + ")";
  return "sine_product";
}

double eval_deriv(const FunctionFamily& family, std::span<const double> w, double x, int order) {
  check(family, w, order);
  if (family.kind == FunctionFamily::Kind::Polynomial) {
    // Horner over the shifted coefficients w_i * i!/(i-r)!.
    double acc = 0.0;
    for (int i = family.degree; i >= order; --i) {
      acc = acc * x + w[i] * falling_factorial(i, order);
    }
    return acc;
  }
  return w[0] * sine_term(x, w[1], order).value + w[2] * linear_term(x, order);
}

void grad_w_deriv_into(const FunctionFamily& family, std::span<const double> w, double x,
                       int order, std::span<double> out) {
  check(family, w, order);
  if (out.size() != w.size()) throw DimensionError("gradient output has wrong length");
  if (family.kind == FunctionFamily::Kind::Polynomial) {
    double xp = 1.0;  // x^(i - order)
    for (int i = 0; i <= family.degree; ++i) {
      if (i < order) {
        out[i] = 0.0;
        continue;
      }
      out[i] = falling_factorial(i, order) * xp;
      xp *= x;
    }
    return;
  }
  const SineTerm s = sine_term(x, w[1], order);
  out[0] = s.value;
  out[1] = w[0] * s.d_phase;
  out[2] = linear_term(x, order);
}

Vector grad_w_deriv(const FunctionFamily& family, std::span<const double> w, double x,
                    int order) {
  Vector g(static_cast<Eigen::Index>(w.size()));
  grad_w_deriv_into(family, w, x, order, {g.data(), static_cast<std::size_t>(g.size())});
  return g;
}

Vector residuals(const FunctionFamily& family, std::span<const double> w,
                 std::span<const SupportCondition> conditions, std::span<const double> weights) {
  Vector r(static_cast<Eigen::Index>(conditions.size()));
  for (std::size_t j = 0; j < conditions.size(); ++j) {
    const auto& c = conditions[j];
    if (c.order < 0 || static_cast<std::size_t>(c.order) >= weights.size()) {
      throw ConfigError("no weight given for derivative order " + std::to_string(c.order));
    }
    const double d = weights[c.order];
    if (!(d > 0.0)) throw ConfigError("order weights must be strictly positive");
    r[static_cast<Eigen::Index>(j)] = std::sqrt(d) * (eval_deriv(family, w, c.x, c.order) - c.y);
  }
  return r;
}

void evaluate_curve(const FunctionFamily& family, std::span<const double> w,
                    std::span<const double> xs, std::span<double> out) {
  if (out.size() != xs.size()) throw DimensionError("curve output has wrong length");
  for (std::size_t j = 0; j < xs.size(); ++j) out[j] = eval_deriv(family, w, xs[j], 0);
}

}  // namespace driftlab
