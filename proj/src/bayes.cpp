#include "bvmlab/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bvmlab/error.hpp"
#include "bvmlab/kernels.hpp"

namespace bvmlab {

GaussianSeriesPrior GaussianSeriesPrior::make(const BasisId& basis, double alpha, double tau) {
  if (!(tau > 0.0)) fail(ErrorCode::InvalidArgument, "prior rescaling tau must be positive");
  GaussianSeriesPrior p;
  p.basis = basis;
  p.alpha = alpha;
  p.tau = tau;
  p.sigma.resize(basis.dimension());
  for (int i = 0; i < basis.dimension(); ++i) p.sigma(i) = std::pow(1.0 + basis.level(i), -alpha);
  return p;
}

Eigen::VectorXd GaussianSeriesPrior::rkhs_weights(bool rescaled) const {
  const double t = rescaled ? tau : 1.0;
  return (t * sigma).array().square().inverse().matrix();
}

Eigen::VectorXd standard_normal(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(size);
  for (int i = 0; i < size; ++i) z(i) = normal(rng);
  return z;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CoefficientFunction prior_sample(const GaussianSeriesPrior& prior, std::uint64_t seed) {
  const Eigen::VectorXd z = standard_normal(prior.basis.dimension(), seed);
  return CoefficientFunction(prior.basis, prior.sd().cwiseProduct(z));
}

double rkhs_norm(const CoefficientFunction& f, const GaussianSeriesPrior& prior, bool rescaled) {
  if (!(f.basis == prior.basis)) fail(ErrorCode::BasisMismatch, "rkhs_norm: basis differs from the prior's");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < f.coeffs.size(); ++i) {
    if (f.coeffs(i) == 0.0) continue;
    if (prior.sigma(i) == 0.0) return std::numeric_limits<double>::infinity();
    sum += f.coeffs(i) * f.coeffs(i) / (prior.sigma(i) * prior.sigma(i));
  }
  return std::sqrt(sum) / (rescaled ? prior.tau : 1.0);
}

double cameron_martin_logratio(const CoefficientFunction& f, const CoefficientFunction& gamma, double t,
                               const GaussianSeriesPrior& prior) {
  const double gnorm = rkhs_norm(gamma, prior, true);
  if (!std::isfinite(gnorm)) fail(ErrorCode::InvalidArgument, "shift direction is outside the RKHS");
  require_same_basis(f, gamma);
  const Eigen::VectorXd w = prior.rkhs_weights(true);
  const double ip = (gamma.coeffs.array() * f.coeffs.array() * w.array()).sum();
  return t * ip - 0.5 * t * t * gnorm * gnorm;
}

Observation simulate_with_noise(double theta0, const CoefficientFunction& f0, const ModelFamily& family,
                                double n, Eigen::VectorXd noise) {
  if (!(n > 0.0)) fail(ErrorCode::InvalidArgument, "noise level n must be positive");
  const double tail = family.truncation_tail(f0);
  if (tail >= 1e-4 / n) {
    std::ostringstream os;
    os << "truth has tail mass " << tail << " beyond the truncation K=" << family.param_basis().truncation
       << "; the noise floor 1e-4/n needs a larger K";
    if (f0.basis.periodic())
      if (const auto* d = dynamic_cast<const DeconvFamily*>(&family))
        os << " (required K_max=" << select_truncation(f0, d->kernel().kappa, n) << ")";
    fail(ErrorCode::TailRule, os.str());
  }
  if (noise.size() != family.obs_dim()) fail(ErrorCode::InvalidArgument, "noise length does not match the model");
  Observation obs;
  obs.n = n;
  obs.theta0 = theta0;
  obs.f0 = family.restrict(f0);
  obs.noise = std::move(noise);
  obs.X = family.matrix(theta0) * obs.f0.coeffs + obs.noise / std::sqrt(n);
  return obs;
}

Observation simulate(double theta0, const CoefficientFunction& f0, const ModelFamily& family, double n,
                     std::uint64_t seed) {
  return simulate_with_noise(theta0, f0, family, n, standard_normal(family.obs_dim(), seed));
}

double log_marginal_from_normal_equations(const Eigen::MatrixXd& G, const Eigen::VectorXd& b, double n,
                                          const Eigen::VectorXd& sd) {
  const Eigen::Index d = sd.size();
  Eigen::MatrixXd M = n * (sd.asDiagonal() * G * sd.asDiagonal());
  M.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "marginal covariance is not positive definite (min diagonal " << M.diagonal().minCoeff()
       << "); a diagonal jitter of at least " << 1e-10 * M.diagonal().maxCoeff() << " would be needed";
    fail(ErrorCode::NotPositiveDefinite, os.str());
  }
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  const Eigen::VectorXd v = sd.cwiseProduct(b);
  const double quad = v.dot(llt.solve(v));
  return -0.5 * (logdet - n * n * quad);
}

double log_marginal_likelihood_dense(double theta, const Observation& obs, const GaussianSeriesPrior& prior,
                                     const ModelFamily& family) {
  const Eigen::MatrixXd A = family.matrix(theta);
  const Eigen::MatrixXd G = A.transpose() * A;
  const Eigen::VectorXd b = A.transpose() * obs.X;
  return log_marginal_from_normal_equations(G, b, obs.n, prior.sd());
}

double log_marginal_likelihood(double theta, const Observation& obs, const GaussianSeriesPrior& prior,
                               const ModelFamily& family) {
  if (!(prior.basis == family.param_basis())) fail(ErrorCode::BasisMismatch, "prior basis differs from the model's");
  if (const auto* dec = dynamic_cast<const DeconvFamily*>(&family); dec && dec->diagonal_gram()) {
    const Eigen::VectorXd b = dec->adjoint_data(theta, obs.X);
    const Eigen::VectorXd sd = prior.sd();
    const double n = obs.n;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const double s2 = sd(i) * sd(i);
      const double m = 1.0 + n * s2 * dec->gram_diagonal(static_cast<int>(i));
      acc += std::log(m) - n * n * s2 * b(i) * b(i) / m;
    }
    return -0.5 * acc;
  }
  Eigen::MatrixXd G;
  Eigen::VectorXd b;
  family.normal_equations(theta, obs.X, G, b);
  return log_marginal_from_normal_equations(G, b, obs.n, prior.sd());
}

GaussianSummary conditional_posterior_f(double theta, const Observation& obs, const GaussianSeriesPrior& prior,
                                        const ModelFamily& family) {
  Eigen::MatrixXd G;
  Eigen::VectorXd b;
  family.normal_equations(theta, obs.X, G, b);
  const Eigen::VectorXd sd = prior.sd();
  const double n = obs.n;
  Eigen::MatrixXd M = n * (sd.asDiagonal() * G * sd.asDiagonal());
  M.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) fail(ErrorCode::NotPositiveDefinite, "conditional posterior precision is not positive definite");
  GaussianSummary out;
  const Eigen::MatrixXd Minv = llt.solve(Eigen::MatrixXd::Identity(M.rows(), M.cols()));
  out.cov = sd.asDiagonal() * Minv * sd.asDiagonal();
  out.mean = n * (out.cov * b);
  return out;
}

ThetaPosterior ThetaPosterior::from_log_density(std::vector<double> grid, std::vector<double> logw) {
  if (grid.size() < 2 || grid.size() != logw.size())
    fail(ErrorCode::InvalidArgument, "theta posterior needs at least two matching grid values");
  ThetaPosterior p;
  p.grid = std::move(grid);
  p.log_weights = std::move(logw);
  const double top = *std::max_element(p.log_weights.begin(), p.log_weights.end());
  p.density.resize(p.grid.size());
  for (std::size_t i = 0; i < p.grid.size(); ++i) p.density[i] = std::exp(p.log_weights[i] - top);
  double z = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i + 1 < p.grid.size(); ++i) {
    const double h = p.grid[i + 1] - p.grid[i];
    z += 0.5 * h * (p.density[i] + p.density[i + 1]);
    m1 += 0.5 * h * (p.grid[i] * p.density[i] + p.grid[i + 1] * p.density[i + 1]);
  }
  for (double& d : p.density) d /= z;
  p.mean = m1 / z;
  double m2 = 0.0;
  for (std::size_t i = 0; i + 1 < p.grid.size(); ++i) {
    const double h = p.grid[i + 1] - p.grid[i];
    const double a = p.grid[i] - p.mean, c = p.grid[i + 1] - p.mean;
    m2 += 0.5 * h * (a * a * p.density[i] + c * c * p.density[i + 1]);
  }
  p.variance = m2;
  p.coarse_spacing = p.grid[1] - p.grid[0];
  return p;
}

double ThetaPosterior::integral() const {
  double z = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) z += 0.5 * (grid[i + 1] - grid[i]) * (density[i] + density[i + 1]);
  return z;
}

double ThetaPosterior::cdf(double theta) const {
  if (theta <= grid.front()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    if (theta < grid[i + 1]) {
      const double u = theta - grid[i];
      return acc + density[i] * u + 0.5 * (density[i + 1] - density[i]) * u * u / h;
    }
    acc += 0.5 * h * (density[i] + density[i + 1]);
  }
  return acc;
}

double ThetaPosterior::quantile(double p) const {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    const double piece = 0.5 * h * (density[i] + density[i + 1]);
    if (acc + piece >= p && piece > 0.0) {
      // Solve acc + d0 u + (d1 - d0) u^2 / (2h) = p for u in [0, h].
      const double target = p - acc, d0 = density[i], slope = (density[i + 1] - density[i]) / h;
      double u;
      if (std::abs(slope) < 1e-300) {
        u = target / d0;
      } else {
        const double disc = std::max(0.0, d0 * d0 + 2.0 * slope * target);
        u = 2.0 * target / (d0 + std::sqrt(disc));
      }
      return grid[i] + std::clamp(u, 0.0, h);
    }
    acc += piece;
  }
  return grid.back();
}

std::pair<double, double> ThetaPosterior::credible_interval(double level) const {
  const double tail = 0.5 * (1.0 - level);
  return {quantile(tail), quantile(1.0 - tail)};
}

double ThetaPosterior::mode() const {
  return grid[static_cast<std::size_t>(std::max_element(density.begin(), density.end()) - density.begin())];
}

namespace {

std::vector<double> uniform_nodes(double a, double b, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (count - 1);
  return out;
}

}  // namespace

ThetaPosterior theta_grid_posterior(const Observation& obs, const GaussianSeriesPrior& prior,
                                    const ModelFamily& family, const ThetaGridSpec& spec,
                                    const LogPrior& log_prior, bool parallel) {
  if (!(spec.theta_max > spec.theta_min) || spec.nodes < 3 || spec.fine_nodes < 3)
    fail(ErrorCode::InvalidArgument, "theta grid needs theta_max > theta_min and at least 3 nodes");
  auto evaluate = [&](const std::vector<double>& thetas) {
    auto lp = parallel ? kernels::log_marginal_grid(thetas, obs, prior, family)
                       : kernels::log_marginal_grid_serial(thetas, obs, prior, family);
    if (log_prior)
      for (std::size_t i = 0; i < thetas.size(); ++i) lp[i] += log_prior(thetas[i]);
    return lp;
  };

  const auto coarse = uniform_nodes(spec.theta_min, spec.theta_max, spec.nodes);
  const auto coarse_lp = evaluate(coarse);
  const double h = coarse[1] - coarse[0];
  const double top = *std::max_element(coarse_lp.begin(), coarse_lp.end());
  std::size_t lo = coarse.size(), hi = 0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    if (coarse_lp[i] > top - 50.0) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  }
  lo = lo > 0 ? lo - 1 : 0;
  hi = std::min(hi + 1, coarse.size() - 1);
  const double wa = coarse[lo], wb = coarse[hi];

  // Fine window values, nested under doubling so earlier evaluations are reused.
  int nf = spec.fine_nodes;
  std::vector<double> fine = uniform_nodes(wa, wb, nf);
  std::vector<double> fine_lp = evaluate(fine);

  auto assemble = [&]() {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(coarse.size() + fine.size());
    for (std::size_t i = 0; i < coarse.size(); ++i)
      if (coarse[i] < wa || coarse[i] > wb) pts.emplace_back(coarse[i], coarse_lp[i]);
    for (std::size_t i = 0; i < fine.size(); ++i) pts.emplace_back(fine[i], fine_lp[i]);
    std::sort(pts.begin(), pts.end());
    std::vector<double> g, w;
    for (const auto& [t, v] : pts) {
      g.push_back(t);
      w.push_back(v);
    }
    auto post = ThetaPosterior::from_log_density(std::move(g), std::move(w));
    post.coarse_spacing = h;
    return post;
  };

  ThetaPosterior post = assemble();
  for (int r = 0; r < spec.max_refinements; ++r) {
    std::vector<double> mids(static_cast<std::size_t>(nf - 1));
    for (int i = 0; i + 1 < nf; ++i) mids[static_cast<std::size_t>(i)] = 0.5 * (fine[i] + fine[i + 1]);
    const auto mids_lp = evaluate(mids);
    std::vector<double> f2, l2;
    for (int i = 0; i < nf; ++i) {
      f2.push_back(fine[i]);
      l2.push_back(fine_lp[i]);
      if (i + 1 < nf) {
        f2.push_back(mids[i]);
        l2.push_back(mids_lp[i]);
      }
    }
    fine = std::move(f2);
    fine_lp = std::move(l2);
    nf = static_cast<int>(fine.size());
    ThetaPosterior next = assemble();
    const double sd = std::sqrt(std::max(post.variance, 1e-300));
    const bool settled = std::abs(next.mean - post.mean) < 1e-3 * sd &&
                         std::abs(next.variance - post.variance) < 1e-3 * post.variance;
    post = std::move(next);
    if (settled) break;
  }

  const double left = post.cdf(spec.theta_min + 3.0 * h);
  const double right = 1.0 - post.cdf(spec.theta_max - 3.0 * h);
  if (left > 1e-3 || right > 1e-3) {
    std::ostringstream os;
    os << "posterior mass near the edge of Theta (left " << left << ", right " << right
       << "); widen Theta or refine the grid";
    fail(ErrorCode::GridTooCoarse, os.str());
  }
  return post;
}

}  // namespace bvmlab
