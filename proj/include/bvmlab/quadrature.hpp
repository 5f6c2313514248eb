#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace bvmlab {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// Gauss-Legendre rule of the given order, nodes by Newton iteration on P_n.
GaussRule gauss_legendre(int order);

// Maps a rule on [-1, 1] to [a, b] and integrates fn.
double integrate(const GaussRule& rule, double a, double b,
                 const std::function<double(double)>& fn);

// Adaptive bisection on [a, b], comparing 10- and 20-point Gauss rules.
double integrate_adaptive(const std::function<double(double)>& fn, double a,
                          double b, double tol = 1e-13, int max_depth = 40);

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace bvmlab
