#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "bvmlab/spectral.hpp"

namespace bvmlab {

using Point2 = std::array<double, 2>;
using CVector = Eigen::VectorXcd;

// Inward line entering the unit disk at (cos beta, sin beta); alpha is the
// angle of the direction against the inner normal.
struct BoundaryLine {
  double beta = 0.0;
  double alpha = 0.0;

  BoundaryLine() = default;
  BoundaryLine(double beta, double alpha);
  double tau() const;
  Point2 entry() const;
  Point2 direction() const;
};

// Tensor grid: uniform beta nodes times Gauss-Legendre alpha nodes; weights
// include the boundary measure factor cos(alpha).
struct LineGrid {
  int nbeta = 0;
  int nalpha = 0;
  std::vector<BoundaryLine> lines;
  std::vector<double> weights;

  static LineGrid make(int nbeta, int nalpha);
  int size() const { return static_cast<int>(lines.size()); }
  double total_weight() const;
};

// chi(r) = 1 on r <= inner, 1 - S3((r - inner)/(outer - inner)) up to outer,
// S3 the order-3 smoothstep.  inner == outer gives the sharp indicator;
// outer <= 0 gives chi = 0.
struct ChiProfile {
  double inner = 0.5;
  double outer = 0.8;

  double operator()(double r) const;
};

struct Attenuation {
  double theta = 0.0;
  ChiProfile chi;
};

Point2 chord_point(const BoundaryLine& line, double t);
double a_chi(const Attenuation& att, const BoundaryLine& line, double t);

constexpr int kDefaultChordOrder = 32;

// Raw per-line values (no quadrature-weight scaling).
CVector apply_K0(const CoefficientFunction& f, const LineGrid& grid, int chord_order = kDefaultChordOrder);
CVector apply_Ktheta(const Attenuation& att, const CoefficientFunction& f, const LineGrid& grid,
                     int chord_order = kDefaultChordOrder);
CVector apply_Ktheta_dot(const Attenuation& att, const CoefficientFunction& f, const LineGrid& grid,
                         int chord_order = kDefaultChordOrder);

// Theta-independent chord data: Zernike values and accumulated attenuation at
// every chord node.  Matrices at any theta are cheap contractions of it.
class XrayGeometry {
 public:
  XrayGeometry(int kmax, LineGrid grid, ChiProfile chi, int chord_order = kDefaultChordOrder);

  int kmax() const { return kmax_; }
  int zernike_count() const { return D_; }
  const LineGrid& grid() const { return grid_; }
  const ChiProfile& chi() const { return chi_; }
  int chord_order() const { return order_; }

  // Complex L x D matrices scaled row-wise by sqrt(line weight).
  Eigen::MatrixXcd matrix(double theta) const;
  Eigen::MatrixXcd derivative_matrix(double theta) const;
  // Both at once, sharing the phase evaluation.
  void matrices(double theta, Eigen::MatrixXcd& A, Eigen::MatrixXcd* Adot) const;

 private:
  int kmax_, D_, order_;
  LineGrid grid_;
  ChiProfile chi_;
  std::vector<double> chord_w_;                  // L * order, chord weight times node spacing
  std::vector<double> atten_;                    // L * order
  std::vector<std::complex<double>> zvals_;      // L * order * D
};

// Rejects grids whose weight sum is more than 1% off the boundary measure 4 pi.
Eigen::MatrixXcd assemble_matrix(const Attenuation& att, const BasisId& basis, const LineGrid& grid,
                                 int chord_order = kDefaultChordOrder);

// Conjugate transpose of the assembled matrix applied to sqrt(w) * h.
CoefficientFunction backproject(const Attenuation& att, const BasisId& basis, const LineGrid& grid,
                                const CVector& h, int chord_order = kDefaultChordOrder);
CoefficientFunction backproject(const Eigen::MatrixXcd& A, const BasisId& basis, const LineGrid& grid,
                                const CVector& h);

// Complex <-> interleaved real coordinates.
CVector to_complex(const Eigen::VectorXd& pairs);
Eigen::VectorXd to_pairs(const CVector& z);
// Real (2m x 2n) representation of a complex m x n matrix acting on pairs.
Eigen::MatrixXd realify(const Eigen::MatrixXcd& A);

}  // namespace bvmlab
