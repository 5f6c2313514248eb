#pragma once

#include <vector>

#include "bvmlab/spectral.hpp"

namespace bvmlab {

// Symmetric periodic kernel given by its real Fourier multipliers g_0..g_K.
struct ConvolutionKernel {
  std::vector<double> g;
  double kappa = 0.0;

  int truncation() const { return static_cast<int>(g.size()) - 1; }
  double mass() const { return g.front(); }
  // g_k^m, the multiplier of the m-fold convolution.
  double power(int k, int m) const;
};

// g_k = |k|^-kappa for k != 0, g_0 = 1.
ConvolutionKernel power_law_kernel(double kappa, int K);
ConvolutionKernel identity_kernel(int K);

struct ShiftedConvOperator {
  ConvolutionKernel kernel;
  double theta = 0.0;
};

// All operators take any periodic representation with the kernel's truncation
// and return Fourier coordinates.  K_theta f = g * f(. - theta).
CoefficientFunction apply_K(const ShiftedConvOperator& op, const CoefficientFunction& f);
CoefficientFunction apply_Kdot(const ShiftedConvOperator& op, const CoefficientFunction& f);
CoefficientFunction apply_Kddot(const ShiftedConvOperator& op, const CoefficientFunction& f);
CoefficientFunction adjoint_K(const ShiftedConvOperator& op, const CoefficientFunction& h);
// m-fold convolution with g, no shift.
CoefficientFunction convolve(const ConvolutionKernel& kernel, const CoefficientFunction& f, int m = 1);

// |h0 - h0(. - delta)|^2 for h0 = g * f0.
double shift_mismatch(const ConvolutionKernel& kernel, const CoefficientFunction& f0, double delta);
// L^2 = sum_k k^2 |h0_k|^2 over both signs of k, the constant in the shift bound.
double shift_lipschitz_sq(const ConvolutionKernel& kernel, const CoefficientFunction& f0);

// Symbol bounds in S^r operator norm from L^2: sup_k g_k (2 pi k)^p sqrt(w_r(k)).
double symbol_bound(const ConvolutionKernel& kernel, int derivative_order, double r);

// Smallest K with sum_{k>K} |g_k f0_k|^2 < 1e-4 / n (power-law kernel).
int select_truncation(const CoefficientFunction& f0, double kappa, double n);

}  // namespace bvmlab
