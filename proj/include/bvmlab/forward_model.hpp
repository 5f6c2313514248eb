#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>

#include "bvmlab/deconv_ops.hpp"
#include "bvmlab/spectral.hpp"
#include "bvmlab/xray_ops.hpp"

namespace bvmlab {

// K_theta and its theta-derivative realized as real matrices at one theta,
// mapping parameter coordinates to observation coordinates.
struct ForwardModel {
  BasisId basis;
  double theta = 0.0;
  Eigen::MatrixXd K;
  Eigen::MatrixXd Kdot;

  Eigen::VectorXd apply(const CoefficientFunction& f) const;
  Eigen::VectorXd apply_dot(const CoefficientFunction& f) const;
};

// A theta-indexed operator family on a fixed truncated parameter basis.
class ModelFamily {
 public:
  virtual ~ModelFamily() = default;

  virtual std::string name() const = 0;
  virtual BasisId param_basis() const = 0;
  virtual int obs_dim() const = 0;
  virtual bool norm_constant_in_theta() const = 0;
  virtual Eigen::MatrixXd matrix(double theta) const = 0;
  virtual Eigen::MatrixXd derivative_matrix(double theta) const = 0;
  // G = K^T K and b = K^T y at theta.
  virtual void normal_equations(double theta, const Eigen::VectorXd& y, Eigen::MatrixXd& G,
                                Eigen::VectorXd& b) const;
  // Squared norm of the part of f0 the truncation drops, measured after K.
  virtual double truncation_tail(const CoefficientFunction& f0) const = 0;
  // f0 expressed on the parameter basis.
  virtual CoefficientFunction restrict(const CoefficientFunction& f0) const = 0;

  ForwardModel realize(double theta) const;
};

class DeconvFamily final : public ModelFamily {
 public:
  DeconvFamily(ConvolutionKernel kernel, BasisId basis);

  std::string name() const override { return "deconvolution"; }
  BasisId param_basis() const override { return basis_; }
  int obs_dim() const override { return 2 * basis_.truncation + 1; }
  bool norm_constant_in_theta() const override { return true; }
  Eigen::MatrixXd matrix(double theta) const override;
  Eigen::MatrixXd derivative_matrix(double theta) const override;
  void normal_equations(double theta, const Eigen::VectorXd& y, Eigen::MatrixXd& G,
                        Eigen::VectorXd& b) const override;
  double truncation_tail(const CoefficientFunction& f0) const override;
  CoefficientFunction restrict(const CoefficientFunction& f0) const override;

  const ConvolutionKernel& kernel() const { return kernel_; }
  // Cosine and full Fourier bases give a diagonal Gram matrix.
  bool diagonal_gram() const;
  // K^T y for the diagonal-Gram bases in O(K).
  Eigen::VectorXd adjoint_data(double theta, const Eigen::VectorXd& y) const;
  double gram_diagonal(int coordinate) const;

 private:
  ConvolutionKernel kernel_;
  BasisId basis_;
};

class XrayFamily final : public ModelFamily {
 public:
  explicit XrayFamily(std::shared_ptr<const XrayGeometry> geometry);

  std::string name() const override { return "xray"; }
  BasisId param_basis() const override;
  int obs_dim() const override { return 2 * geometry_->grid().size(); }
  bool norm_constant_in_theta() const override { return false; }
  Eigen::MatrixXd matrix(double theta) const override;
  Eigen::MatrixXd derivative_matrix(double theta) const override;
  void normal_equations(double theta, const Eigen::VectorXd& y, Eigen::MatrixXd& G,
                        Eigen::VectorXd& b) const override;
  double truncation_tail(const CoefficientFunction& f0) const override;
  CoefficientFunction restrict(const CoefficientFunction& f0) const override;

  const XrayGeometry& geometry() const { return *geometry_; }

 private:
  std::shared_ptr<const XrayGeometry> geometry_;
};

}  // namespace bvmlab
