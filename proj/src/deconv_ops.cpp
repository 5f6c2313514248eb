#include "bvmlab/deconv_ops.hpp"

#include <cmath>
#include <numbers>

#include "bvmlab/error.hpp"

namespace bvmlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CoefficientFunction fourier_input(const ConvolutionKernel& kernel, const CoefficientFunction& f) {
  if (!f.basis.periodic()) fail(ErrorCode::BasisMismatch, "deconvolution operators need a periodic basis");
  if (f.basis.truncation != kernel.truncation())
    fail(ErrorCode::BasisMismatch, "truncation mismatch: function K=" + std::to_string(f.basis.truncation) +
                                       ", kernel K=" + std::to_string(kernel.truncation()));
  return to_fourier(f);
}

// Per frequency: scale * R(phi) * J^quarter (a, b), J the quarter turn.
CoefficientFunction rotate(const ShiftedConvOperator& op, const CoefficientFunction& f, int order) {
  auto out = fourier_input(op.kernel, f);
  auto& c = out.coeffs;
  c(0) = order == 0 ? op.kernel.g[0] * c(0) : 0.0;
  for (int k = 1; k <= op.kernel.truncation(); ++k) {
    const double w = kTwoPi * k, phi = w * op.theta;
    const double cs = std::cos(phi), sn = std::sin(phi);
    double a = c(2 * k - 1), b = c(2 * k);
    double x = op.kernel.g[k] * (a * cs - b * sn), y = op.kernel.g[k] * (a * sn + b * cs);
    if (order == 1) {
      const double t = x;
      x = -w * y;
      y = w * t;
    } else if (order == 2) {
      x *= -w * w;
      y *= -w * w;
    }
    c(2 * k - 1) = x;
    c(2 * k) = y;
  }
  return out;
}

}  // namespace

double ConvolutionKernel::power(int k, int m) const { return std::pow(g[static_cast<std::size_t>(k)], m); }

ConvolutionKernel power_law_kernel(double kappa, int K) {
  if (K < 1) fail(ErrorCode::InvalidArgument, "kernel truncation must be >= 1");
  ConvolutionKernel kernel;
  kernel.kappa = kappa;
  kernel.g.resize(static_cast<std::size_t>(K + 1));
  kernel.g[0] = 1.0;
  for (int k = 1; k <= K; ++k) kernel.g[static_cast<std::size_t>(k)] = std::pow(double(k), -kappa);
  return kernel;
}

ConvolutionKernel identity_kernel(int K) { return power_law_kernel(0.0, K); }

CoefficientFunction apply_K(const ShiftedConvOperator& op, const CoefficientFunction& f) {
  return rotate(op, f, 0);
}

CoefficientFunction apply_Kdot(const ShiftedConvOperator& op, const CoefficientFunction& f) {
  return rotate(op, f, 1);
}

CoefficientFunction apply_Kddot(const ShiftedConvOperator& op, const CoefficientFunction& f) {
  return rotate(op, f, 2);
}

CoefficientFunction adjoint_K(const ShiftedConvOperator& op, const CoefficientFunction& h) {
  return apply_K({op.kernel, -op.theta}, h);
}

CoefficientFunction convolve(const ConvolutionKernel& kernel, const CoefficientFunction& f, int m) {
  auto out = fourier_input(kernel, f);
  out.coeffs(0) *= kernel.power(0, m);
  for (int k = 1; k <= kernel.truncation(); ++k) {
    out.coeffs(2 * k - 1) *= kernel.power(k, m);
    out.coeffs(2 * k) *= kernel.power(k, m);
  }
  return out;
}

double shift_mismatch(const ConvolutionKernel& kernel, const CoefficientFunction& f0, double delta) {
  const auto h = convolve(kernel, f0);
  double sum = 0.0;
  for (int k = 1; k <= kernel.truncation(); ++k) {
    const double s = std::sin(std::numbers::pi * k * delta);
    sum += 4.0 * s * s * (h.coeffs(2 * k - 1) * h.coeffs(2 * k - 1) + h.coeffs(2 * k) * h.coeffs(2 * k));
  }
  return sum;
}

double shift_lipschitz_sq(const ConvolutionKernel& kernel, const CoefficientFunction& f0) {
  const auto h = convolve(kernel, f0);
  double sum = 0.0;
  for (int k = 1; k <= kernel.truncation(); ++k)
    sum += double(k) * k * (h.coeffs(2 * k - 1) * h.coeffs(2 * k - 1) + h.coeffs(2 * k) * h.coeffs(2 * k));
  return sum;
}

double symbol_bound(const ConvolutionKernel& kernel, int p, double r) {
  double best = p == 0 ? std::abs(kernel.g[0]) : 0.0;
  for (int k = 1; k <= kernel.truncation(); ++k) {
    const double w = r >= 0 ? 1.0 + std::pow(double(k), 2.0 * r) : std::pow(1.0 + k, 2.0 * r);
    best = std::max(best, std::abs(kernel.g[static_cast<std::size_t>(k)]) * std::pow(kTwoPi * k, p) * std::sqrt(w));
  }
  return best;
}

int select_truncation(const CoefficientFunction& f0, double kappa, double n) {
  const auto F = to_fourier(f0);
  const int K0 = F.basis.truncation;
  const double floor = 1e-4 / n;
  for (int K = 1; K <= K0; ++K) {
    double tail = 0.0;
    for (int k = K + 1; k <= K0; ++k) {
      const double g = std::pow(double(k), -kappa);
      tail += g * g * (F.coeffs(2 * k - 1) * F.coeffs(2 * k - 1) + F.coeffs(2 * k) * F.coeffs(2 * k));
    }
    if (tail < floor) return K;
  }
  return K0;
}

}  // namespace bvmlab
