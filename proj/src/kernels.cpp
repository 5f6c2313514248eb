#include "bvmlab/kernels.hpp"

#include <omp.h>

#include "bvmlab/quadrature.hpp"

namespace bvmlab::kernels {

std::vector<double> log_marginal_grid(const std::vector<double>& thetas, const Observation& obs,
                                      const GaussianSeriesPrior& prior, const ModelFamily& family) {
  std::vector<double> out(thetas.size());
  const long n = static_cast<long>(thetas.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) out[i] = log_marginal_likelihood(thetas[i], obs, prior, family);
  return out;
}

std::vector<double> log_marginal_grid_serial(const std::vector<double>& thetas, const Observation& obs,
                                             const GaussianSeriesPrior& prior, const ModelFamily& family) {
  std::vector<double> out;
  out.reserve(thetas.size());
  for (double t : thetas) out.push_back(log_marginal_likelihood(t, obs, prior, family));
  return out;
}

Eigen::MatrixXcd xray_matrix_serial(const XrayGeometry& geometry, double theta) {
  const auto& grid = geometry.grid();
  const Attenuation att{theta, geometry.chi()};
  const GaussRule rule = gauss_legendre(geometry.chord_order());
  const int D = geometry.zernike_count();
  Eigen::MatrixXcd A(grid.size(), D);
  for (int j = 0; j < D; ++j) {
    CoefficientFunction e(BasisId(BasisTag::ZernikeDisk, geometry.kmax()));
    e.coeffs(2 * j) = 1.0;
    for (int l = 0; l < grid.size(); ++l) {
      const auto& line = grid.lines[static_cast<std::size_t>(l)];
      const double tau = line.tau();
      std::complex<double> sum = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double s = 0.5 * tau * (1.0 + rule.nodes[q]);
        const auto p = chord_point(line, s);
        sum += 0.5 * tau * rule.weights[q] * evaluate_disk(e, p[0], p[1]) *
               std::polar(1.0, -theta * a_chi(att, line, s));
      }
      A(l, j) = std::sqrt(grid.weights[static_cast<std::size_t>(l)]) * sum;
    }
  }
  return A;
}

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace bvmlab::kernels
