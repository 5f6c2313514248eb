#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bvmlab/bayes.hpp"
#include "bvmlab/xray_ops.hpp"

namespace bvmlab::kernels {

// Log marginal likelihood on a list of theta values.  The parallel version
// splits the list across OpenMP threads; the serial one is the reference.
std::vector<double> log_marginal_grid(const std::vector<double>& thetas, const Observation& obs,
                                      const GaussianSeriesPrior& prior, const ModelFamily& family);
std::vector<double> log_marginal_grid_serial(const std::vector<double>& thetas, const Observation& obs,
                                             const GaussianSeriesPrior& prior, const ModelFamily& family);

// Entry-by-entry X-ray matrix without the cached chord tables.
Eigen::MatrixXcd xray_matrix_serial(const XrayGeometry& geometry, double theta);

int max_threads();
void set_threads(int n);

}  // namespace bvmlab::kernels
