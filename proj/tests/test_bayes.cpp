#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bvmlab/bayes.hpp"
#include "bvmlab/error.hpp"
#include "bvmlab/forward_model.hpp"
#include "oracles.hpp"

using namespace bvmlab;

namespace {

constexpr double kPi = std::numbers::pi;

CoefficientFunction one_plus_cos(int K) {
  CoefficientFunction f(BasisId(BasisTag::FourierPeriodic, K));
  f.coeffs(0) = 1.0;
  f.coeffs(1) = 1.0 / std::numbers::sqrt2;
  return f;
}

DeconvFamily model1(int K) { return DeconvFamily(power_law_kernel(3.0, K), BasisId(BasisTag::CosineSymmetric, K)); }

// Diagonal Gaussian log density.
double log_gauss(const Eigen::VectorXd& x, const Eigen::VectorXd& sd) {
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) s += -0.5 * std::pow(x(i) / sd(i), 2) - std::log(sd(i)) - 0.5 * std::log(2 * kPi);
  return s;
}

}  // namespace

TEST_CASE("prior sampling") {
  const BasisId b(BasisTag::FourierPeriodic, 4);
  auto prior = GaussianSeriesPrior::make(b, 1.5, 2.0);
  CHECK(prior.sigma(0) == 1.0);
  CHECK(prior.sigma(3) == doctest::Approx(std::pow(3.0, -1.5)));
  auto zero = prior;
  zero.sigma.setZero();
  CHECK(prior_sample(zero, 1).coeffs.norm() == 0.0);

  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(b.dimension());
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) sum_sq += prior_sample(prior, derive_seed(5, i)).coeffs.array().square().matrix();
  const Eigen::VectorXd var = sum_sq / draws;
  for (int i = 0; i < b.dimension(); ++i) CHECK(std::abs(var(i) / std::pow(prior.sd()(i), 2) - 1.0) < 0.05);
  CHECK_THROWS_AS(GaussianSeriesPrior::make(b, 1.0, 0.0), Error);
}

TEST_CASE("RKHS norm") {
  const BasisId b(BasisTag::CosineSymmetric, 5);
  const auto prior = GaussianSeriesPrior::make(b, 2.0, 3.0);
  CHECK(rkhs_norm(CoefficientFunction(b), prior, false) == 0.0);
  CoefficientFunction f(b);
  f.coeffs(2) = prior.sigma(2);
  CHECK(rkhs_norm(f, prior, false) == doctest::Approx(1.0));
  CHECK(rkhs_norm(f, prior, true) == doctest::Approx(1.0 / 3.0));
  auto degenerate = prior;
  degenerate.sigma(2) = 0.0;
  CHECK(std::isinf(rkhs_norm(f, degenerate, false)));
  CHECK_THROWS_AS(cameron_martin_logratio(f, f, 1.0, degenerate), Error);
}

TEST_CASE("Cameron-Martin against the Gaussian density ratio") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  const BasisId b(BasisTag::FourierPeriodic, 6);
  const auto prior = GaussianSeriesPrior::make(b, 1.5, 1.7);
  for (int trial = 0; trial < 50; ++trial) {
    CoefficientFunction f(b), g(b);
    for (int i = 0; i < b.dimension(); ++i) {
      f.coeffs(i) = nd(rng) * prior.sd()(i);
      g.coeffs(i) = nd(rng) * prior.sd()(i);
    }
    CHECK(cameron_martin_logratio(f, g, 0.0, prior) == 0.0);
    const double t = nd(rng);
    const double direct = log_gauss(f.coeffs - t * g.coeffs, prior.sd()) - log_gauss(f.coeffs, prior.sd());
    CHECK(cameron_martin_logratio(f, g, t, prior) == doctest::Approx(direct).epsilon(1e-10));
    // Chain rule: shifting by s + t is shifting by s, then by t from f - s g.
    const double s = nd(rng);
    const CoefficientFunction fs(b, f.coeffs - s * g.coeffs);
    const double lhs = cameron_martin_logratio(f, g, s + t, prior);
    const double rhs = cameron_martin_logratio(f, g, s, prior) + cameron_martin_logratio(fs, g, t, prior);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("simulation") {
  const auto fam = model1(3);
  const auto truth = one_plus_cos(3);
  const auto clean = simulate_with_noise(0.1, truth, fam, 1e4, Eigen::VectorXd::Zero(fam.obs_dim()));
  CHECK((clean.X - fam.matrix(0.1) * fam.restrict(truth).coeffs).norm() == 0.0);

  const auto a = simulate(0.1, truth, fam, 1e4, 42), b = simulate(0.1, truth, fam, 1e4, 42);
  CHECK(a.X == b.X);
  CHECK(a.noise == b.noise);

  const double n = 400.0;
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(fam.obs_dim());
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    const auto obs = simulate(0.1, truth, fam, n, derive_seed(9, r));
    sum_sq += (obs.X - clean.X).array().square().matrix();
  }
  for (int i = 0; i < fam.obs_dim(); ++i) CHECK(std::abs(sum_sq(i) / reps * n - 1.0) < 0.05);

  CoefficientFunction rough(BasisId(BasisTag::FourierPeriodic, 5));
  rough.coeffs(9) = 1.0;
  try {
    simulate(0.1, rough, model1(2), 1e4, 1);
    FAIL("expected the tail rule to fire");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TailRule);
    CHECK(std::string(e.what()).find("required K_max=5") != std::string::npos);
  }
}

TEST_CASE("fast and dense marginal likelihoods agree") {
  const auto truth = one_plus_cos(6);
  for (BasisTag tag : {BasisTag::CosineSymmetric, BasisTag::FourierPeriodic, BasisTag::ZeroLocationFourier}) {
    const DeconvFamily fam(power_law_kernel(3.0, 6), BasisId(tag, 6));
    const auto obs = simulate(0.1, truth, fam, 1e5, 7);
    const auto prior = GaussianSeriesPrior::make(fam.param_basis(), 1.0, std::pow(1e5, 1.0 / 18.0));
    for (double th = -0.3; th <= 0.3; th += 0.0125) {
      const double fast = log_marginal_likelihood(th, obs, prior, fam);
      const double dense = log_marginal_likelihood_dense(th, obs, prior, fam);
      CHECK(std::abs(fast - dense) <= 1e-9 * std::max(1.0, std::abs(dense)));
    }
  }
}

TEST_CASE("degenerate prior gives a flat profile") {
  const auto fam = model1(4);
  const auto obs = simulate(0.1, one_plus_cos(4), fam, 1e4, 3);
  const auto prior = GaussianSeriesPrior::make(fam.param_basis(), 1.0, 1e-9);
  const double ref = log_marginal_likelihood(0.0, obs, prior, fam);
  for (double th = -0.3; th <= 0.3; th += 0.05) CHECK(std::abs(log_marginal_likelihood(th, obs, prior, fam) - ref) < 1e-10);
}

TEST_CASE("normal-equation path rejects an indefinite matrix") {
  Eigen::MatrixXd G = -Eigen::MatrixXd::Identity(2, 2);
  try {
    log_marginal_from_normal_equations(G, Eigen::VectorXd::Zero(2), 10.0, Eigen::VectorXd::Ones(2));
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
    CHECK(std::string(e.what()).find("jitter") != std::string::npos);
  }
}

TEST_CASE("conditional posterior limits") {
  const int K = 4;
  const DeconvFamily fam(power_law_kernel(3.0, K), BasisId(BasisTag::FourierPeriodic, K));
  const auto truth = one_plus_cos(K);
  const auto obs = simulate(0.1, truth, fam, 1e4, 11);
  const auto flat = GaussianSeriesPrior::make(fam.param_basis(), 1.0, 1e8);
  const auto post = conditional_posterior_f(0.1, obs, flat, fam);
  const Eigen::VectorXd inv = fam.matrix(0.1).colPivHouseholderQr().solve(obs.X);
  CHECK((post.mean - inv).norm() < 1e-6 * inv.norm());

  const auto clean = simulate_with_noise(0.1, truth, fam, 1e12, Eigen::VectorXd::Zero(fam.obs_dim()));
  const auto prior = GaussianSeriesPrior::make(fam.param_basis(), 1.0, 1.0);
  const auto post2 = conditional_posterior_f(0.1, clean, prior, fam);
  CHECK((post2.mean - fam.restrict(truth).coeffs).norm() < 1e-6);
}

TEST_CASE("theta posterior bookkeeping") {
  std::vector<double> grid, logw;
  for (int i = 0; i <= 400; ++i) {
    const double t = -1.0 + 2.0 * i / 400.0;
    grid.push_back(t);
    logw.push_back(-0.5 * t * t / 0.04);
  }
  const auto p = ThetaPosterior::from_log_density(grid, logw);
  CHECK(p.integral() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(p.mean) < 1e-12);
  CHECK(p.variance == doctest::Approx(0.04).epsilon(1e-3));
  for (double q : {0.025, 0.3, 0.5, 0.9}) CHECK(p.cdf(p.quantile(q)) == doctest::Approx(q).epsilon(1e-12));
  const auto [lo, hi] = p.credible_interval(0.95);
  CHECK(lo == doctest::Approx(-hi).epsilon(1e-9));
  CHECK(hi == doctest::Approx(1.959964 * 0.2).epsilon(2e-3));
  for (double d : p.density) CHECK(d >= 0.0);
}

TEST_CASE("grid posterior: normalization, span, zero-noise mode, edge rejection") {
  const int K = 1;
  const auto fam = model1(K);
  const auto truth = one_plus_cos(K);
  ThetaGridSpec spec;
  const double n = 1e8;
  const auto obs = simulate_with_noise(0.1, truth, fam, n, Eigen::VectorXd::Zero(fam.obs_dim()));
  const auto prior = GaussianSeriesPrior::make(fam.param_basis(), 1.0, std::pow(n, 1.0 / 18.0));
  const auto post = theta_grid_posterior(obs, prior, fam, spec);
  CHECK(post.integral() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(post.grid.front() == spec.theta_min);
  CHECK(post.grid.back() == spec.theta_max);
  CHECK(std::is_sorted(post.grid.begin(), post.grid.end()));
  CHECK(std::abs(post.mode() - 0.1) <= post.coarse_spacing);
  CHECK(std::abs(post.mean - 0.1) <= post.coarse_spacing);

  const auto serial = theta_grid_posterior(obs, prior, fam, spec, nullptr, false);
  CHECK(serial.density == post.density);

  ThetaGridSpec tight = spec;
  tight.theta_min = 0.0995;
  const auto obs6 = simulate(0.1, truth, fam, 1e6, 5);
  try {
    theta_grid_posterior(obs6, GaussianSeriesPrior::make(fam.param_basis(), 1.0, 2.0), fam, tight);
    FAIL("expected a grid rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridTooCoarse);
  }
}

TEST_CASE("prior on theta washes out") {
  const auto fam = model1(1);
  const auto truth = one_plus_cos(1);
  const Eigen::VectorXd noise = standard_normal(fam.obs_dim(), 31);
  const LogPrior tilt = [](double t) { return 4.0 * t; };
  std::vector<double> tvs;
  for (double n : {1e4, 1e6}) {
    const auto obs = simulate_with_noise(0.1, truth, fam, n, noise);
    const auto prior = GaussianSeriesPrior::make(fam.param_basis(), 1.0, std::pow(n, 1.0 / 18.0));
    const auto flat = theta_grid_posterior(obs, prior, fam, ThetaGridSpec{});
    const auto tilted = theta_grid_posterior(obs, prior, fam, ThetaGridSpec{}, tilt);
    tvs.push_back(oracles::tv_between(flat, tilted));
  }
  CHECK(tvs[1] < tvs[0]);
  CHECK(tvs[1] < 0.05);
}

TEST_CASE("grid marginal agrees with brute-force importance sampling") {
  const auto fam = model1(4);
  const auto obs = simulate(0.1, one_plus_cos(4), fam, 100.0, 2024);
  const auto prior = GaussianSeriesPrior::make(fam.param_basis(), 1.0, std::pow(100.0, 1.0 / 18.0));
  ThetaGridSpec spec;
  spec.nodes = 121;
  spec.fine_nodes = 121;
  spec.max_refinements = 0;
  const auto post = theta_grid_posterior(obs, prior, fam, spec);
  const auto brute = oracles::importance_sampling_posterior(post.grid, obs, prior, fam, 200000, 99);
  CHECK(oracles::tv_between(post, brute) < 0.05);
}

TEST_CASE("small-ball probabilities grow with the radius") {
  const auto fam = model1(3);
  const auto truth = fam.restrict(one_plus_cos(3));
  const auto prior = GaussianSeriesPrior::make(fam.param_basis(), 1.0, 1.0);
  const Eigen::MatrixXd K0 = fam.matrix(0.1);
  const Eigen::VectorXd target = K0 * truth.coeffs;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ut(-0.3, 0.3);
  std::vector<double> eps{0.25, 0.5, 1.0};
  std::vector<int> hits(eps.size(), 0);
  for (int i = 0; i < 100000; ++i) {
    const auto f = prior_sample(prior, derive_seed(123, i));
    const double d = (fam.matrix(ut(rng)) * f.coeffs - target).norm();
    for (std::size_t j = 0; j < eps.size(); ++j) hits[j] += d <= eps[j];
  }
  CHECK(hits[0] > 0);
  CHECK(hits[1] > hits[0]);
  CHECK(hits[2] > hits[1]);
}
