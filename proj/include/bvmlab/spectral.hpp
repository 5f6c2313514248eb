#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bvmlab {

enum class BasisTag { FourierPeriodic, CosineSymmetric, ZeroLocationFourier, ZernikeDisk };

// Order in which the sines are orthogonalized against the sawtooth.  Both
// span the same subspace; Reverse exists to check basis independence.
enum class SineOrder { Forward, Reverse };

std::string to_string(BasisTag tag);
BasisTag parse_basis_tag(const std::string& text);

// Coordinate layouts (all real-orthonormal):
//   FourierPeriodic      [1, c1, s1, ..., cK, sK], c_k = sqrt2 cos(2 pi k t), s_k = sqrt2 sin(2 pi k t)
//   CosineSymmetric      [1, c1, ..., cK]
//   ZeroLocationFourier  [1, c1, ..., cK, v1, ..., v_{K-1}], v_j sines orthogonalized against S_K
//   ZernikeDisk          [re Z00, im Z00, re Z10, im Z10, ...], Z_{k,l} at j = k(k+1)/2 + l
struct BasisId {
  BasisTag tag = BasisTag::FourierPeriodic;
  int truncation = 1;
  SineOrder order = SineOrder::Forward;

  BasisId() = default;
  BasisId(BasisTag t, int k, SineOrder o = SineOrder::Forward);

  int dimension() const;
  // Frequency (periodic) or degree (Zernike) attached to a real coordinate.
  int level(int coordinate) const;
  bool periodic() const { return tag != BasisTag::ZernikeDisk; }

  friend bool operator==(const BasisId& a, const BasisId& b) {
    return a.tag == b.tag && a.truncation == b.truncation && a.order == b.order;
  }
};

struct CoefficientFunction {
  BasisId basis;
  Eigen::VectorXd coeffs;

  CoefficientFunction() = default;
  explicit CoefficientFunction(const BasisId& b);
  CoefficientFunction(const BasisId& b, Eigen::VectorXd c);
};

void require_same_basis(const CoefficientFunction& f, const CoefficientFunction& g);

double inner_product(const CoefficientFunction& f, const CoefficientFunction& g);
double l2_norm(const CoefficientFunction& f);

// r >= 0: weight 1 + |k|^{2r} (1 at k = 0);  r < 0: weight (1 + |k|)^{2r}.
double sobolev_norm(const CoefficientFunction& f, double r);

// Coefficient of S(t) = t on [-1/2, 1/2) against s_k.
double sawtooth_coefficient(int k);
// Exact sum over k > K of sawtooth_coefficient(k)^2.
double sawtooth_tail_mass(int K);
CoefficientFunction sawtooth(int K);

CoefficientFunction to_fourier(const CoefficientFunction& f);
// Orthogonal projection of a Fourier representation onto the target's span.
CoefficientFunction from_fourier(const CoefficientFunction& f, const BasisId& target);
// Dense (2K+1) x dim matrix whose columns are the target basis in Fourier coordinates.
Eigen::MatrixXd fourier_embedding(const BasisId& basis);

CoefficientFunction project_zero_location(const CoefficientFunction& f);
double evaluate(const CoefficientFunction& f, double t);
// Derivative of a periodic function, returned in Fourier coordinates.
CoefficientFunction derivative(const CoefficientFunction& f);

int zernike_dimension(int kmax);
int zernike_index(int k, int l);
std::pair<int, int> zernike_degree_order(int j);
// Radial polynomial R_n^m by the three-term recurrence.
double zernike_radial(int n, int m, double r);
std::complex<double> zernike_eval(int k, int l, double x, double y);
// All normalized Zernike values up to degree kmax at (x, y), flattened index order.
void zernike_values(int kmax, double x, double y, std::complex<double>* out);
std::complex<double> evaluate_disk(const CoefficientFunction& f, double x, double y);
double zernike_sobolev_norm(const CoefficientFunction& f, double s);

}  // namespace bvmlab
