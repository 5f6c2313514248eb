#include <benchmark/benchmark.h>

#include <memory>

#include "bvmlab/bayes.hpp"
#include "bvmlab/kernels.hpp"

namespace {

using namespace bvmlab;

std::vector<double> thetas(int n, double a, double b) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return t;
}

struct XrayFixture {
  std::shared_ptr<XrayGeometry> geometry;
  std::unique_ptr<XrayFamily> family;
  Observation obs;
  GaussianSeriesPrior prior;

  XrayFixture() {
    geometry = std::make_shared<XrayGeometry>(6, LineGrid::make(32, 16), ChiProfile{});
    family = std::make_unique<XrayFamily>(geometry);
    CoefficientFunction f0(family->param_basis());
    f0.coeffs(0) = 1.0;
    f0.coeffs(4) = 0.3;
    obs = simulate(1.0, f0, *family, 1e5, 7);
    prior = GaussianSeriesPrior::make(family->param_basis(), 3.5, 1.8);
  }
};

XrayFixture& xray() {
  static XrayFixture f;
  return f;
}

struct DeconvFixture {
  DeconvFamily family{power_law_kernel(3.0, 64), BasisId(BasisTag::ZeroLocationFourier, 64)};
  Observation obs;
  GaussianSeriesPrior prior;

  DeconvFixture() {
    CoefficientFunction f0(BasisId(BasisTag::FourierPeriodic, 1));
    f0.coeffs(0) = 1.0;
    f0.coeffs(1) = 1.0 / std::sqrt(2.0);
    obs = simulate(0.1, f0, family, 1e5, 11);
    prior = GaussianSeriesPrior::make(family.param_basis(), 1.5, 2.0);
  }
};

DeconvFixture& deconv() {
  static DeconvFixture f;
  return f;
}

void BM_XrayGridSerial(benchmark::State& state) {
  auto& f = xray();
  const auto t = thetas(16, 0.5, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::log_marginal_grid_serial(t, f.obs, f.prior, *f.family));
}

void BM_XrayGridParallel(benchmark::State& state) {
  auto& f = xray();
  const auto t = thetas(16, 0.5, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::log_marginal_grid(t, f.obs, f.prior, *f.family));
}

void BM_DeconvGridSerial(benchmark::State& state) {
  auto& f = deconv();
  const auto t = thetas(64, -0.3, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::log_marginal_grid_serial(t, f.obs, f.prior, f.family));
}

void BM_DeconvGridParallel(benchmark::State& state) {
  auto& f = deconv();
  const auto t = thetas(64, -0.3, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::log_marginal_grid(t, f.obs, f.prior, f.family));
}

void BM_XrayMatrixCached(benchmark::State& state) {
  auto& f = xray();
  for (auto _ : state) benchmark::DoNotOptimize(f.geometry->matrix(1.0));
}

void BM_XrayMatrixSerial(benchmark::State& state) {
  auto& f = xray();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::xray_matrix_serial(*f.geometry, 1.0));
}

BENCHMARK(BM_XrayGridSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_XrayGridParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DeconvGridSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DeconvGridParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_XrayMatrixCached)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_XrayMatrixSerial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
