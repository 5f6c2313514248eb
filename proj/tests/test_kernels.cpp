#include <doctest.h>

#include <cmath>

#include "bvmlab/bayes.hpp"
#include "bvmlab/kernels.hpp"

using namespace bvmlab;

TEST_CASE("parallel and serial marginal likelihood agree") {
  const int K = 16;
  const DeconvFamily fam(power_law_kernel(3.0, K), BasisId(BasisTag::CosineSymmetric, K));
  CoefficientFunction f0(fam.param_basis());
  f0.coeffs(0) = 1.0;
  f0.coeffs(1) = 1.0;
  const auto obs = simulate(0.1, f0, fam, 1e4, 3);
  const auto prior = GaussianSeriesPrior::make(fam.param_basis(), 1.0, 1.0);
  std::vector<double> thetas;
  for (int i = 0; i < 257; ++i) thetas.push_back(-0.4 + 0.8 * i / 256);
  for (int t : {1, 2, 4}) {
    kernels::set_threads(t);
    const auto par = kernels::log_marginal_grid(thetas, obs, prior, fam);
    const auto ser = kernels::log_marginal_grid_serial(thetas, obs, prior, fam);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) CHECK(par[i] == ser[i]);
  }
  kernels::set_threads(0);
  CHECK(kernels::max_threads() >= 1);
}

TEST_CASE("uncached X-ray matrix matches the cached one") {
  const XrayGeometry geom(3, LineGrid::make(24, 12), ChiProfile{0.5, 0.8}, 32);
  for (double theta : {0.0, 0.7, 1.3}) {
    const Eigen::MatrixXcd a = geom.matrix(theta);
    const Eigen::MatrixXcd b = kernels::xray_matrix_serial(geom, theta);
    CHECK((a - b).norm() <= 1e-12 * std::max(1.0, a.norm()));
  }
}
