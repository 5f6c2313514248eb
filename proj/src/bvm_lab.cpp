#include "bvmlab/bvm_lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "bvmlab/config.hpp"
#include "bvmlab/error.hpp"
#include "bvmlab/quadrature.hpp"
#include "bvmlab/tabular_io.hpp"

namespace bvmlab {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

double parse_number(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("experiment.f0", "f0: cannot parse '" + s + "' in term '" + context + "'");
  }
}

int parse_int(const std::string& s, const std::string& context) {
  const double v = parse_number(s, context);
  if (v != std::floor(v) || v < 0) throw ConfigError("experiment.f0", "f0: bad index in term '" + context + "'");
  return static_cast<int>(v);
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

}  // namespace

double BvMReference::sd() const { return std::sqrt(variance); }

double BvMReference::pdf(double theta) const { return normal_pdf((theta - center) / sd()) / sd(); }

double BvMReference::cdf(double theta) const { return normal_cdf((theta - center) / sd()); }

BvMReference bvm_reference(double theta0, double delta, double info, double n) {
  if (!(info > 0.0)) fail(ErrorCode::InvalidArgument, "BvM reference needs positive efficient information");
  if (!(n > 0.0)) fail(ErrorCode::InvalidArgument, "BvM reference needs n > 0");
  return BvMReference{theta0 + delta / std::sqrt(n), 1.0 / (n * info)};
}

double tv_distance(const ThetaPosterior& post, const BvMReference& ref) {
  const double outside = ref.cdf(post.grid.front()) + (1.0 - ref.cdf(post.grid.back()));
  if (outside > 1e-6) {
    std::ostringstream os;
    os << "reference mass " << outside << " lies outside the theta grid; widen Theta or increase n";
    fail(ErrorCode::SupportViolation, os.str());
  }
  double sum = 0.0;
  double prev = std::abs(post.density[0] - ref.pdf(post.grid[0]));
  for (std::size_t i = 0; i + 1 < post.grid.size(); ++i) {
    const double next = std::abs(post.density[i + 1] - ref.pdf(post.grid[i + 1]));
    sum += 0.5 * (post.grid[i + 1] - post.grid[i]) * (prev + next);
    prev = next;
  }
  return std::min(2.0, sum + outside);
}

Example example_kind(const ExperimentConfig& cfg) {
  if (cfg.example == "xray") return Example::Xray;
  if (cfg.example == "deconv_model1" || cfg.example == "deconv_model2") return Example::Deconvolution;
  throw ConfigError("experiment.example", "unknown example '" + cfg.example + "'");
}

int deconv_model(const ExperimentConfig& cfg) { return cfg.example == "deconv_model2" ? 2 : 1; }

CoefficientFunction parse_truth(const ExperimentConfig& cfg) {
  const auto terms = split(cfg.f0, ',');
  if (terms.empty()) throw ConfigError("experiment.f0", "f0: no terms");
  if (example_kind(cfg) == Example::Deconvolution) {
    struct Term { bool cosine; int k; double a; };
    std::vector<Term> parsed;
    int K = 1;
    for (const auto& t : terms) {
      const auto parts = split(t, ':');
      if (parts.size() != 2 || parts[0].size() < 2 || (parts[0][0] != 'c' && parts[0][0] != 's'))
        throw ConfigError("experiment.f0", "f0: term '" + t + "' is not of the form cK:a or sK:a");
      const int k = parse_int(parts[0].substr(1), t);
      if (parts[0][0] == 's' && k == 0) throw ConfigError("experiment.f0", "f0: s0 is not a valid term");
      parsed.push_back({parts[0][0] == 'c', k, parse_number(parts[1], t)});
      K = std::max(K, k);
    }
    CoefficientFunction f(BasisId(BasisTag::FourierPeriodic, K));
    for (const auto& t : parsed) {
      if (t.k == 0) f.coeffs(0) += t.a;
      else f.coeffs(t.cosine ? 2 * t.k - 1 : 2 * t.k) += t.a / std::numbers::sqrt2;
    }
    return f;
  }
  struct Term { int k, l; double re, im; };
  std::vector<Term> parsed;
  int K = 1;
  for (const auto& t : terms) {
    const auto parts = split(t, ':');
    const auto kl = parts.empty() ? std::vector<std::string>{} : split(parts[0].substr(1), '_');
    if (parts.size() != 3 || parts[0][0] != 'z' || kl.size() != 2)
      throw ConfigError("experiment.f0", "f0: term '" + t + "' is not of the form zK_L:re:im");
    Term term{parse_int(kl[0], t), parse_int(kl[1], t), parse_number(parts[1], t), parse_number(parts[2], t)};
    if (term.l > term.k) throw ConfigError("experiment.f0", "f0: term '" + t + "' needs L <= K");
    parsed.push_back(term);
    K = std::max(K, term.k);
  }
  CoefficientFunction f(BasisId(BasisTag::ZernikeDisk, K));
  for (const auto& t : parsed) {
    const int j = zernike_index(t.k, t.l);
    f.coeffs(2 * j) += t.re;
    f.coeffs(2 * j + 1) += t.im;
  }
  return f;
}

ExperimentSetup prepare_experiment(const ExperimentConfig& cfg) {
  ExperimentSetup s;
  const Example ex = example_kind(cfg);
  const auto truth = parse_truth(cfg);
  if (cfg.n_list.empty()) throw ConfigError("experiment.n", "empty list of noise levels");
  const double n_max = *std::max_element(cfg.n_list.begin(), cfg.n_list.end());
  s.rates = rate_bundle(ex, cfg.alpha, cfg.kappa_or_beta, deconv_model(cfg), cfg.beta, true);
  if (ex == Example::Deconvolution) {
    const int model = deconv_model(cfg);
    if (model == 1 && to_fourier(truth).coeffs(Eigen::seq(2, Eigen::last, 2)).norm() > 0.0)
      fail(ErrorCode::InvalidArgument, "model 1 truth must be symmetric (cosine terms only)");
    if (model == 2 && std::abs(inner_product(truth, sawtooth(truth.basis.truncation))) > 1e-12)
      fail(ErrorCode::InvalidArgument, "model 2 truth must have location zero");
    const int K = std::max(cfg.kmax, select_truncation(truth, cfg.kappa_or_beta, n_max));
    const BasisTag tag = model == 1 ? BasisTag::CosineSymmetric : BasisTag::ZeroLocationFourier;
    s.family = std::make_shared<DeconvFamily>(power_law_kernel(cfg.kappa_or_beta, K), BasisId(tag, K));
    const DeconvFamily fine(power_law_kernel(cfg.kappa_or_beta, 2 * K), BasisId(tag, 2 * K));
    s.sweep = lfd_sweep(*s.family, fine, truth, cfg.theta0);
    s.sweep_done = true;
  } else {
    const int kmax = cfg.kmax > 0 ? cfg.kmax : 8;
    auto geom = std::make_shared<XrayGeometry>(kmax, LineGrid::make(cfg.nbeta, cfg.nalpha),
                                               ChiProfile{cfg.chi_inner, cfg.chi_outer}, cfg.chord_order);
    s.family = std::make_shared<XrayFamily>(geom);
  }
  s.scenario = scenario_check(s.rates, s.family->norm_constant_in_theta(),
                              !(ex == Example::Deconvolution && deconv_model(cfg) == 2));
  if (!s.scenario.pass) fail(ErrorCode::HypothesisViolated, "rate conditions of scenario (" + s.scenario.scenario + ") fail");
  s.f0 = s.family->restrict(truth);
  s.model0 = s.family->realize(cfg.theta0);
  s.lfd = lfd_solve(s.model0, s.f0);
  if (!(s.lfd.info > 0.0)) fail(ErrorCode::InvalidLfd, "efficient information is not positive");
  return s;
}

GaussianSeriesPrior experiment_prior(const ExperimentSetup& setup, const ExperimentConfig& cfg, double n) {
  const double tau = std::pow(n, to_double(setup.rates.tau_exponent));
  return GaussianSeriesPrior::make(setup.family->param_basis(), cfg.alpha, tau);
}

BvMReport bvm_single(const ExperimentSetup& setup, const ExperimentConfig& cfg, double n,
                     const Eigen::VectorXd& noise, bool parallel, ThetaPosterior* post_out) {
  const auto start = std::chrono::steady_clock::now();
  const Observation obs = simulate_with_noise(cfg.theta0, setup.f0, *setup.family, n,
                                              cfg.zero_noise ? Eigen::VectorXd::Zero(noise.size()) : noise);
  const auto prior = experiment_prior(setup, cfg, n);
  ThetaPosterior post = theta_grid_posterior(obs, prior, *setup.family, cfg.grid, nullptr, parallel);
  BvMReport r;
  r.n = n;
  r.info = setup.lfd.info;
  r.delta = recentering_delta(setup.model0, setup.f0, setup.lfd.gamma, r.info, obs.noise);
  const auto ref = bvm_reference(cfg.theta0, r.delta, r.info, n);
  r.tv = tv_distance(post, ref);
  r.post_mean = post.mean;
  r.post_var = post.variance;
  std::tie(r.ci_lo, r.ci_hi) = post.credible_interval(cfg.level);
  const double z = normal_quantile(0.5 * (1.0 + cfg.level));
  r.ref_lo = ref.center - z * ref.sd();
  r.ref_hi = ref.center + z * ref.sd();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (post_out) *post_out = std::move(post);
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.setup = prepare_experiment(cfg);
  const Eigen::VectorXd noise = standard_normal(res.setup.family->obs_dim(), cfg.seed);
  auto ns = cfg.n_list;
  std::sort(ns.begin(), ns.end());
  for (double n : ns) {
    ThetaPosterior post;
    res.reports.push_back(bvm_single(res.setup, cfg, n, noise, true, &post));
    res.posteriors.push_back(std::move(post));
  }
  return res;
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= double(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / double(v.size() - 1);
}

double ks_normal(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = double(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = normal_cdf(v[i]);
    d = std::max({d, F - double(i) / n, double(i + 1) / n - F});
  }
  return d;
}

CoverageResult coverage_study(const ExperimentConfig& cfg, int R) {
  if (R < 100) fail(ErrorCode::InvalidArgument, "coverage study needs R >= 100 replicates");
  ExperimentConfig single = cfg;
  single.n_list = {cfg.coverage_n};
  const ExperimentSetup setup = prepare_experiment(single);
  CoverageResult res;
  res.n = cfg.coverage_n;
  res.replicates = R;
  std::vector<BvMReport> reps(static_cast<std::size_t>(R));
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < R; ++r) {
    try {
      const auto noise = standard_normal(setup.family->obs_dim(), derive_seed(cfg.seed, std::uint64_t(r)));
      reps[static_cast<std::size_t>(r)] = bvm_single(setup, single, cfg.coverage_n, noise, false);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  const double scale = std::sqrt(cfg.coverage_n * setup.lfd.info);
  int hits = 0;
  for (const auto& rep : reps) {
    if (rep.ci_lo <= cfg.theta0 && cfg.theta0 <= rep.ci_hi) ++hits;
    res.z.push_back(scale * (rep.post_mean - cfg.theta0));
    res.z_recentered.push_back(scale * (rep.post_mean - cfg.theta0 - rep.delta / std::sqrt(cfg.coverage_n)));
  }
  res.coverage = double(hits) / R;
  res.z_variance = sample_variance(res.z);
  res.ks_statistic = ks_normal(res.z);
  res.ks_critical_99 = 1.628 / std::sqrt(double(R));
  return res;
}

std::string report_csv(const std::vector<BvMReport>& reports) {
  std::ostringstream os;
  os << "# tv is the integral of |p - q| over theta (twice the largest set discrepancy, range [0, 2])\n";
  os << "n,tv,post_mean,post_var,delta,info,ci_lo,ci_hi,ref_lo,ref_hi,seconds\n";
  for (const auto& r : reports) {
    const double row[] = {r.n, r.tv, r.post_mean, r.post_var, r.delta, r.info,
                          r.ci_lo, r.ci_hi, r.ref_lo, r.ref_hi, r.seconds};
    for (std::size_t i = 0; i < std::size(row); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
  return os.str();
}

std::string posterior_csv(const ThetaPosterior& post) {
  std::ostringstream os;
  os << "theta,density,log_weight\n";
  for (std::size_t i = 0; i < post.grid.size(); ++i)
    os << format_double(post.grid[i]) << ',' << format_double(post.density[i]) << ','
       << format_double(post.log_weights[i]) << '\n';
  return os.str();
}

}  // namespace bvmlab
