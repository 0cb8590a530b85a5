#pragma once

#include "driftlab/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace driftlab {

/// A parametrized scalar curve f(w, x) with closed-form x-derivatives and
/// w-gradients.
///
///   Polynomial(d):  f(w, x) = sum_{i=0..d} w_i x^i           (d + 1 params)
///   SineProduct:    f(w, x) = w_0 x sin(pi x - w_1) + w_2 x  (3 params)
struct FunctionFamily {
  enum class Kind { Polynomial, SineProduct };

  Kind kind = Kind::Polynomial;
  int degree = 0;     // Polynomial only
  int max_order = 3;  // highest supported x-derivative order

  static FunctionFamily polynomial(int degree, int max_order = 3);
  static FunctionFamily sine_product(int max_order = 3);

  int param_dim() const noexcept {
    return kind == Kind::Polynomial ? degree + 1 : 3;
  }

  std::string name() const;

  friend bool operator==(const FunctionFamily&, const FunctionFamily&) = default;
};

/// Target for the `order`-th x-derivative of f at position x.
struct SupportCondition {
  int order = 0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const SupportCondition&, const SupportCondition&) = default;
};

/// d^order/dx^order f(w, x).
/// Throws UnsupportedOrderError if order > max_order, DimensionError if w has
/// the wrong length.
double eval_deriv(const FunctionFamily& family, std::span<const double> w, double x, int order);

/// Gradient with respect to w of d^order/dx^order f(w, x).
Vector grad_w_deriv(const FunctionFamily& family, std::span<const double> w, double x, int order);

/// Writes the gradient into `out` (length param_dim) without allocating.
void grad_w_deriv_into(const FunctionFamily& family, std::span<const double> w, double x,
                       int order, std::span<double> out);

/// Weighted residual vector: entry j is sqrt(D_order) * (d^order f(w, x_j) - y_j).
/// Its squared norm is the support-point objective. `weights[i]` is D_i and
/// must cover every condition order.
Vector residuals(const FunctionFamily& family, std::span<const double> w,
                 std::span<const SupportCondition> conditions, std::span<const double> weights);

/// Evaluates f(w, x) at every x in `xs`.
void evaluate_curve(const FunctionFamily& family, std::span<const double> w,
                    std::span<const double> xs, std::span<double> out);

}  // namespace driftlab
