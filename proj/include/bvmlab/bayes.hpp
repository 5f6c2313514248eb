#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "bvmlab/forward_model.hpp"
#include "bvmlab/spectral.hpp"

namespace bvmlab {

// Independent N(0, (tau sigma_i)^2) coordinates with sigma_i = (1 + level_i)^-alpha.
struct GaussianSeriesPrior {
  BasisId basis;
  Eigen::VectorXd sigma;
  double alpha = 0.0;
  double tau = 1.0;

  static GaussianSeriesPrior make(const BasisId& basis, double alpha, double tau);
  Eigen::VectorXd sd() const { return tau * sigma; }
  Eigen::VectorXd rkhs_weights(bool rescaled = true) const;
};

CoefficientFunction prior_sample(const GaussianSeriesPrior& prior, std::uint64_t seed);

// sqrt(sum f_i^2 / sigma_i^2); rescaled divides by tau (the RKHS of tau * f').
// Infinity when f has mass on a coordinate with sigma_i = 0.
double rkhs_norm(const CoefficientFunction& f, const GaussianSeriesPrior& prior, bool rescaled);

// log of the density of the law of f + t gamma against the prior, at f:
// t <gamma, f>_H - t^2 |gamma|_H^2 / 2 in the rescaled RKHS.
double cameron_martin_logratio(const CoefficientFunction& f, const CoefficientFunction& gamma, double t,
                               const GaussianSeriesPrior& prior);

struct Observation {
  double n = 1.0;
  Eigen::VectorXd X;      // K_theta0 f0 + noise / sqrt(n)
  Eigen::VectorXd noise;  // raw standard normal draw
  double theta0 = 0.0;
  CoefficientFunction f0;  // truth on the model's parameter basis
};

// Standard normal vector from a 64-bit seed (mt19937_64 + Box-Muller via std::normal_distribution).
Eigen::VectorXd standard_normal(int size, std::uint64_t seed);

// SplitMix64 step, used to derive independent per-task seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

Observation simulate(double theta0, const CoefficientFunction& f0, const ModelFamily& family, double n,
                     std::uint64_t seed);
Observation simulate_with_noise(double theta0, const CoefficientFunction& f0, const ModelFamily& family,
                                double n, Eigen::VectorXd noise);

// Log marginal likelihood of theta up to theta-free constants.  Uses the
// O(K) path for deconvolution bases with diagonal Gram matrices.
double log_marginal_likelihood(double theta, const Observation& obs, const GaussianSeriesPrior& prior,
                               const ModelFamily& family);
// Always the dense Woodbury path; used to cross-check the O(K) path.
double log_marginal_likelihood_dense(double theta, const Observation& obs, const GaussianSeriesPrior& prior,
                                     const ModelFamily& family);
double log_marginal_from_normal_equations(const Eigen::MatrixXd& G, const Eigen::VectorXd& b, double n,
                                          const Eigen::VectorXd& sd);

struct GaussianSummary {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};
GaussianSummary conditional_posterior_f(double theta, const Observation& obs, const GaussianSeriesPrior& prior,
                                        const ModelFamily& family);

struct ThetaGridSpec {
  double theta_min = -0.3;
  double theta_max = 0.3;
  int nodes = 4001;
  int fine_nodes = 801;
  int max_refinements = 5;
};

struct ThetaPosterior {
  std::vector<double> grid;
  std::vector<double> log_weights;
  std::vector<double> density;
  double mean = 0.0;
  double variance = 0.0;
  double coarse_spacing = 0.0;

  // Normalizes a log density given on a sorted grid (trapezoid rule).
  static ThetaPosterior from_log_density(std::vector<double> grid, std::vector<double> log_weights);
  double integral() const;
  double cdf(double theta) const;
  double quantile(double p) const;
  std::pair<double, double> credible_interval(double level) const;
  double mode() const;
};

using LogPrior = std::function<double(double)>;

ThetaPosterior theta_grid_posterior(const Observation& obs, const GaussianSeriesPrior& prior,
                                    const ModelFamily& family, const ThetaGridSpec& spec,
                                    const LogPrior& log_prior = nullptr, bool parallel = true);

}  // namespace bvmlab
