#pragma once

#include <functional>
#include <string>
#include <vector>

#include <boost/rational.hpp>
#include <Eigen/Dense>

#include "bvmlab/deconv_ops.hpp"
#include "bvmlab/forward_model.hpp"
#include "bvmlab/spectral.hpp"

namespace bvmlab {

struct LfdSolution {
  CoefficientFunction gamma;
  double residual = 0.0;       // max_j |<Kdot f0 - K gamma, K h_j>|
  double info = 0.0;           // |Kdot f0|^2 - |K gamma|^2
  double info_residual = 0.0;  // |Kdot f0 - K gamma|^2
  double condition = 0.0;      // condition number of the Gram matrix
};

// Least-squares projection of Kdot f0 onto the range of K restricted to the
// model basis.  f0 must already live on model.basis.
LfdSolution lfd_solve(const ForwardModel& model, const CoefficientFunction& f0);

struct LfdSweep {
  double info_coarse = 0.0;
  double info_fine = 0.0;
  double relative_change = 0.0;
  bool flagged = false;  // change above 0.5%
};
LfdSweep lfd_sweep(const ModelFamily& coarse, const ModelFamily& fine, const CoefficientFunction& f0,
                   double theta0);

// 12 <f0', S> from the Fourier coefficients.
double location_lambda(const CoefficientFunction& f0);
// 12 * integral of f0'(t) t over [-1/2, 1/2], pointwise Gauss quadrature.
double location_lambda_quadrature(const CoefficientFunction& f0);
// 12 (f0(1/2) - integral of f0), pointwise evaluation.
double location_lambda_endpoint(const CoefficientFunction& f0);

// -f0' + lambda g^(m) * S in Fourier coordinates.
CoefficientFunction lfd_model2_closed(const CoefficientFunction& f0, int m, const ConvolutionKernel& kernel);

struct InfoForms {
  double residual_form = 0.0;    // |d - K gamma|^2
  double difference_form = 0.0;  // |d|^2 - |K gamma|^2
};
InfoForms info_forms(const Eigen::VectorXd& kdot_f0, const Eigen::VectorXd& k_gamma);
// Rejects gamma when the two forms disagree beyond tol (relative to |d|^2).
InfoForms efficient_info(const ForwardModel& model, const CoefficientFunction& f0,
                         const CoefficientFunction& gamma, double tol = 1e-8);

double recentering_delta(const ForwardModel& model, const CoefficientFunction& f0,
                         const CoefficientFunction& gamma, double info, const Eigen::VectorXd& noise);

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct DecenteringRow {
  double eps = 0.0;
  double psi = 0.0;
  double delta = 0.0;
  int cutoff = 0;
};

// Cutoff approximants h_K = coordinates of gamma with level <= K; weights are
// the RKHS weights of the prior on gamma's basis.
std::vector<DecenteringRow> decentering_profile(const CoefficientFunction& gamma,
                                                const Eigen::VectorXd& rkhs_weights, const LinearMap& A,
                                                const std::vector<double>& eps_grid);

// Least-squares slope of log psi against log eps over rows with finite psi > 0.
double loglog_slope(const std::vector<DecenteringRow>& rows);

enum class Example { Deconvolution, Xray };

using Rational = boost::rational<long long>;
Rational to_rational(double x, long long max_denominator = 1000000);
double to_double(const Rational& r);
std::string to_string(const Rational& r);

struct RateBundle {
  Example example = Example::Deconvolution;
  int model = 1;  // deconvolution model 1 or 2
  Rational alpha, kappa_or_beta, beta;
  Rational eps_exponent;  // eps_n = n^{-eps_exponent}
  Rational tau_exponent;  // tau_n = n^{tau_exponent}
  Rational eta;
  Rational xi_exponent;   // xi_n = n^{-xi_exponent}
};

// check = false skips the hypothesis checks (for probing scenario_check).
RateBundle rate_bundle(Example example, double alpha, double kappa_or_beta, int model = 1,
                       double beta = 0.0, bool check = true);

struct ScenarioResult {
  std::string scenario;  // "iv", "iii", "ii", "i" or "none"
  bool pass = false;
  std::vector<std::string> notes;
};

ScenarioResult scenario_check(const RateBundle& bundle, bool norm_constant_in_theta, bool gamma_in_rkhs);

}  // namespace bvmlab
