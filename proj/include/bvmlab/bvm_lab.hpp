#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bvmlab/bayes.hpp"
#include "bvmlab/efficiency.hpp"
#include "bvmlab/forward_model.hpp"

namespace bvmlab {

struct BvMReference {
  double center = 0.0;
  double variance = 1.0;

  double sd() const;
  double pdf(double theta) const;
  double cdf(double theta) const;
};

BvMReference bvm_reference(double theta0, double delta, double info, double n);

// Integral of |p - q| (the factor-2 convention, range [0, 2]) by trapezoid on
// the posterior grid plus the reference mass outside it.
double tv_distance(const ThetaPosterior& post, const BvMReference& ref);

struct BvMReport {
  double n = 0.0;
  double tv = 0.0;
  double post_mean = 0.0;
  double post_var = 0.0;
  double delta = 0.0;
  double info = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  double ref_lo = 0.0, ref_hi = 0.0;
  double seconds = 0.0;
};

struct ExperimentConfig {
  std::string example = "deconv_model1";  // deconv_model1 | deconv_model2 | xray
  double alpha = 1.0;
  double kappa_or_beta = 3.0;
  double beta = 0.0;  // Sobolev index of the stability estimate (deconvolution)
  double theta0 = 0.1;
  std::string f0 = "c0:1,c1:1";
  std::vector<double> n_list{1e4, 1e5, 1e6};
  std::uint64_t seed = 1;
  int replicates = 200;
  ThetaGridSpec grid;
  int kmax = 0;  // 0: truncation rule (deconvolution) or 8 (X-ray)
  bool zero_noise = false;
  double level = 0.95;
  // X-ray geometry
  int nbeta = 64, nalpha = 32, chord_order = 32;
  double chi_inner = 0.5, chi_outer = 0.8;
  // Coverage study
  double coverage_n = 1e6;
  double coverage_lo = 0.90, coverage_hi = 0.99;
};

Example example_kind(const ExperimentConfig& cfg);
int deconv_model(const ExperimentConfig& cfg);

// Truth from the config's term list: "cK:a" / "sK:a" add a cos / sin(2 pi K t)
// term with amplitude a; "zK_L:re:im" adds (re + i im) times normalized Z_{K,L}.
CoefficientFunction parse_truth(const ExperimentConfig& cfg);

// Everything an experiment needs besides the per-n data.
struct ExperimentSetup {
  std::shared_ptr<ModelFamily> family;
  CoefficientFunction f0;  // on the family basis
  RateBundle rates;
  ScenarioResult scenario;
  ForwardModel model0;  // realized at theta0
  LfdSolution lfd;
  LfdSweep sweep;  // deconvolution only
  bool sweep_done = false;
};

ExperimentSetup prepare_experiment(const ExperimentConfig& cfg);
GaussianSeriesPrior experiment_prior(const ExperimentSetup& setup, const ExperimentConfig& cfg, double n);

struct ExperimentResult {
  ExperimentSetup setup;
  std::vector<BvMReport> reports;
  std::vector<ThetaPosterior> posteriors;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);
BvMReport bvm_single(const ExperimentSetup& setup, const ExperimentConfig& cfg, double n,
                     const Eigen::VectorXd& noise, bool parallel, ThetaPosterior* post_out = nullptr);

struct CoverageResult {
  double n = 0.0;
  int replicates = 0;
  double coverage = 0.0;
  std::vector<double> z;             // sqrt(n i) (mean - theta0)
  std::vector<double> z_recentered;  // sqrt(n i) (mean - theta0 - delta / sqrt n)
  double z_variance = 0.0;
  double ks_statistic = 0.0;         // Kolmogorov-Smirnov distance of z to N(0, 1)
  double ks_critical_99 = 0.0;
};

CoverageResult coverage_study(const ExperimentConfig& cfg, int R);

double sample_variance(const std::vector<double>& v);
double ks_normal(std::vector<double> v);

std::string report_csv(const std::vector<BvMReport>& reports);
std::string posterior_csv(const ThetaPosterior& post);

}  // namespace bvmlab
