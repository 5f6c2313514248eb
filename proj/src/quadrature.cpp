#include "bvmlab/quadrature.hpp"

#include <array>

#include "bvmlab/error.hpp"

namespace bvmlab {

GaussRule gauss_legendre(int order) {
  if (order < 1) fail(ErrorCode::InvalidArgument, "gauss_legendre: order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= order; ++n) {
        const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int n = 2; n <= order; ++n) {
      const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

double integrate(const GaussRule& rule, double a, double b,
                 const std::function<double(double)>& fn) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * fn(mid + half * rule.nodes[i]);
  return sum * half;
}

namespace {

const GaussRule& rule_low() {
  static const GaussRule r = gauss_legendre(10);
  return r;
}
const GaussRule& rule_high() {
  static const GaussRule r = gauss_legendre(20);
  return r;
}

double adapt(const std::function<double(double)>& fn, double a, double b, double tol,
             int depth) {
  const double lo = integrate(rule_low(), a, b, fn);
  const double hi = integrate(rule_high(), a, b, fn);
  if (std::abs(hi - lo) <= tol || depth <= 0) return hi;
  const double m = 0.5 * (a + b);
  return adapt(fn, a, m, 0.5 * tol, depth - 1) + adapt(fn, m, b, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& fn, double a, double b,
                          double tol, int max_depth) {
  if (b <= a) return 0.0;
  return adapt(fn, a, b, tol, max_depth);
}

}  // namespace bvmlab
