#include "bvmlab/forward_model.hpp"

#include <cmath>

#include "bvmlab/error.hpp"

namespace bvmlab {

Eigen::VectorXd ForwardModel::apply(const CoefficientFunction& f) const {
  if (!(f.basis == basis)) fail(ErrorCode::BasisMismatch, "forward model applied to a foreign basis");
  return K * f.coeffs;
}

Eigen::VectorXd ForwardModel::apply_dot(const CoefficientFunction& f) const {
  if (!(f.basis == basis)) fail(ErrorCode::BasisMismatch, "forward model applied to a foreign basis");
  return Kdot * f.coeffs;
}

void ModelFamily::normal_equations(double theta, const Eigen::VectorXd& y, Eigen::MatrixXd& G,
                                   Eigen::VectorXd& b) const {
  const Eigen::MatrixXd A = matrix(theta);
  G = A.transpose() * A;
  b = A.transpose() * y;
}

ForwardModel ModelFamily::realize(double theta) const {
  return ForwardModel{param_basis(), theta, matrix(theta), derivative_matrix(theta)};
}

DeconvFamily::DeconvFamily(ConvolutionKernel kernel, BasisId basis)
    : kernel_(std::move(kernel)), basis_(basis) {
  if (!basis_.periodic()) fail(ErrorCode::BasisMismatch, "deconvolution needs a periodic basis");
  if (basis_.truncation != kernel_.truncation())
    fail(ErrorCode::BasisMismatch, "kernel and basis truncations differ");
}

namespace {

template <class Op>
Eigen::MatrixXd columns(const BasisId& basis, int rows, Op op) {
  Eigen::MatrixXd M(rows, basis.dimension());
  for (int i = 0; i < basis.dimension(); ++i) {
    CoefficientFunction e(basis);
    e.coeffs(i) = 1.0;
    M.col(i) = op(e).coeffs;
  }
  return M;
}

}  // namespace

Eigen::MatrixXd DeconvFamily::matrix(double theta) const {
  const ShiftedConvOperator op{kernel_, theta};
  return columns(basis_, obs_dim(), [&](const CoefficientFunction& e) { return apply_K(op, e); });
}

Eigen::MatrixXd DeconvFamily::derivative_matrix(double theta) const {
  const ShiftedConvOperator op{kernel_, theta};
  return columns(basis_, obs_dim(), [&](const CoefficientFunction& e) { return apply_Kdot(op, e); });
}

bool DeconvFamily::diagonal_gram() const {
  return basis_.tag == BasisTag::CosineSymmetric || basis_.tag == BasisTag::FourierPeriodic;
}

double DeconvFamily::gram_diagonal(int i) const {
  const double g = kernel_.g[static_cast<std::size_t>(basis_.level(i))];
  return g * g;
}

Eigen::VectorXd DeconvFamily::adjoint_data(double theta, const Eigen::VectorXd& y) const {
  const CoefficientFunction Y(BasisId(BasisTag::FourierPeriodic, basis_.truncation), y);
  return from_fourier(adjoint_K({kernel_, theta}, Y), basis_).coeffs;
}

void DeconvFamily::normal_equations(double theta, const Eigen::VectorXd& y, Eigen::MatrixXd& G,
                                    Eigen::VectorXd& b) const {
  if (!diagonal_gram()) {
    ModelFamily::normal_equations(theta, y, G, b);
    return;
  }
  const int d = basis_.dimension();
  G = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) G(i, i) = gram_diagonal(i);
  b = adjoint_data(theta, y);
}

double DeconvFamily::truncation_tail(const CoefficientFunction& f0) const {
  const auto F = to_fourier(f0);
  double tail = 0.0;
  for (int k = basis_.truncation + 1; k <= F.basis.truncation; ++k) {
    const double g = std::pow(double(k), -kernel_.kappa);
    tail += g * g * (F.coeffs(2 * k - 1) * F.coeffs(2 * k - 1) + F.coeffs(2 * k) * F.coeffs(2 * k));
  }
  return tail;
}

CoefficientFunction DeconvFamily::restrict(const CoefficientFunction& f0) const {
  if (f0.basis == basis_) return f0;
  return from_fourier(to_fourier(f0), basis_);
}

XrayFamily::XrayFamily(std::shared_ptr<const XrayGeometry> geometry) : geometry_(std::move(geometry)) {}

BasisId XrayFamily::param_basis() const { return BasisId(BasisTag::ZernikeDisk, geometry_->kmax()); }

Eigen::MatrixXd XrayFamily::matrix(double theta) const { return realify(geometry_->matrix(theta)); }

Eigen::MatrixXd XrayFamily::derivative_matrix(double theta) const {
  return realify(geometry_->derivative_matrix(theta));
}

void XrayFamily::normal_equations(double theta, const Eigen::VectorXd& y, Eigen::MatrixXd& G,
                                  Eigen::VectorXd& b) const {
  const Eigen::MatrixXcd A = geometry_->matrix(theta);
  const Eigen::MatrixXcd Gc = A.adjoint() * A;
  G = realify(Gc);
  b = to_pairs(A.adjoint() * to_complex(y));
}

double XrayFamily::truncation_tail(const CoefficientFunction& f0) const {
  const int keep = 2 * geometry_->zernike_count();
  if (f0.coeffs.size() <= keep) return 0.0;
  return f0.coeffs.tail(f0.coeffs.size() - keep).squaredNorm();
}

CoefficientFunction XrayFamily::restrict(const CoefficientFunction& f0) const {
  if (f0.basis.tag != BasisTag::ZernikeDisk) fail(ErrorCode::BasisMismatch, "X-ray truth must be ZernikeDisk");
  CoefficientFunction out(param_basis());
  const int n = std::min<int>(out.coeffs.size(), f0.coeffs.size());
  out.coeffs.head(n) = f0.coeffs.head(n);
  return out;
}

}  // namespace bvmlab
