#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "bvmlab/error.hpp"
#include "bvmlab/quadrature.hpp"
#include "bvmlab/spectral.hpp"
#include "bvmlab/tabular_io.hpp"

using namespace bvmlab;

namespace {

constexpr double kPi = std::numbers::pi;

CoefficientFunction random_function(const BasisId& b, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CoefficientFunction f(b);
  for (int i = 0; i < f.coeffs.size(); ++i) f.coeffs(i) = nd(rng);
  return f;
}

// Radial polynomial from its explicit factorial sum.
double radial_factorial(int n, int m, double r) {
  double s = 0.0;
  for (int j = 0; j <= (n - m) / 2; ++j) {
    const double num = std::tgamma(n - j + 1.0);
    const double den = std::tgamma(j + 1.0) * std::tgamma((n + m) / 2 - j + 1.0) * std::tgamma((n - m) / 2 - j + 1.0);
    s += ((j % 2) ? -1.0 : 1.0) * num / den * std::pow(r, n - 2 * j);
  }
  return s;
}

// Polar Gauss product rule on the unit disk: r-nodes carry the Jacobian r.
template <class F>
std::complex<double> disk_integral(F fn, int nr = 40, int nphi = 80) {
  const auto rule = gauss_legendre(nr);
  std::complex<double> acc = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = 0.5 * (rule.nodes[i] + 1.0), wr = 0.5 * rule.weights[i] * r;
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2.0 * kPi * j / nphi;
      acc += wr * (2.0 * kPi / nphi) * fn(r * std::cos(phi), r * std::sin(phi));
    }
  }
  return acc;
}

}  // namespace

TEST_CASE("basis dimensions and levels") {
  CHECK(BasisId(BasisTag::FourierPeriodic, 5).dimension() == 11);
  CHECK(BasisId(BasisTag::CosineSymmetric, 5).dimension() == 6);
  CHECK(BasisId(BasisTag::ZeroLocationFourier, 5).dimension() == 10);
  CHECK(BasisId(BasisTag::ZernikeDisk, 3).dimension() == 20);
  CHECK(BasisId(BasisTag::FourierPeriodic, 5).level(4) == 2);
  CHECK_THROWS_AS(BasisId(BasisTag::FourierPeriodic, 0), Error);
  CHECK_THROWS_AS(CoefficientFunction(BasisId(BasisTag::FourierPeriodic, 2), Eigen::VectorXd::Zero(4)), Error);
}

TEST_CASE("inner product examples") {
  const BasisId b(BasisTag::FourierPeriodic, 3);
  CoefficientFunction e1(b), e2(b);
  e1.coeffs(1) = 1.0;
  e2.coeffs(2) = 1.0;
  CHECK(inner_product(e1, e2) == 0.0);
  CHECK(inner_product(e1, e1) == 1.0);
  const auto s = sawtooth(256);
  CHECK(std::abs(inner_product(s, s) - 1.0 / 12.0) <= 10.0 * sawtooth_tail_mass(256));
  CoefficientFunction other(BasisId(BasisTag::CosineSymmetric, 3));
  try {
    inner_product(e1, other);
    FAIL("expected a basis mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BasisMismatch);
  }
}

TEST_CASE("sawtooth tail mass matches a direct sum") {
  double direct = 0.0;
  for (int k = 20001; k <= 4000000; ++k) direct += std::pow(sawtooth_coefficient(k), 2);
  direct += 1.0 / (2.0 * kPi * kPi * 4000000.0);  // integral tail of 1/(2 pi^2 k^2)
  CHECK(sawtooth_tail_mass(20000) == doctest::Approx(direct).epsilon(1e-6));
  CHECK(sawtooth_tail_mass(0) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("sobolev norm examples") {
  const BasisId b(BasisTag::FourierPeriodic, 2);
  CHECK(sobolev_norm(CoefficientFunction(b), 1.0) == 0.0);
  CoefficientFunction f(b);
  f.coeffs(1) = 1.0;
  CHECK(sobolev_norm(f, 0.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(sobolev_norm(f, 1.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(sobolev_norm(f, -1.0) == doctest::Approx(0.5));
}

TEST_CASE("sawtooth pointwise values") {
  const auto s = sawtooth(512);
  const double tol = 10.0 * sawtooth_tail_mass(512);
  CHECK(std::abs(evaluate(s, 0.0)) <= tol);
  CHECK(std::abs(evaluate(s, 0.25) - 0.25) <= tol);
  CHECK(std::abs(l2_norm(s) * l2_norm(s) - 1.0 / 12.0) <= tol);
}

TEST_CASE("zero-location projection examples") {
  const int K = 256;
  const auto s = sawtooth(K);
  CHECK(l2_norm(project_zero_location(s)) < 1e-15);

  std::mt19937_64 rng(3);
  auto even = random_function(BasisId(BasisTag::FourierPeriodic, K), rng);
  for (int k = 1; k <= K; ++k) even.coeffs(2 * k) = 0.0;
  CHECK((project_zero_location(even).coeffs - even.coeffs).norm() == 0.0);

  // sin(2 pi t) = s_1 / sqrt2; c from quadrature of both inner products.
  const auto rule = gauss_legendre(64);
  const double ip = integrate(rule, -0.5, 0.5, [](double t) { return std::sin(2 * kPi * t) * t; });
  const double c = ip / (1.0 / 12.0);
  CoefficientFunction sn(BasisId(BasisTag::FourierPeriodic, K));
  sn.coeffs(2) = 1.0 / std::numbers::sqrt2;
  const auto out = project_zero_location(sn);
  const Eigen::VectorXd expected = sn.coeffs - c * s.coeffs;
  const double tol = 10.0 * sawtooth_tail_mass(K) * 12.0 * std::abs(c) * l2_norm(s);
  CHECK((out.coeffs - expected).norm() <= tol);
}

TEST_CASE("Parseval against pointwise quadrature") {
  std::mt19937_64 rng(11);
  const auto rule = gauss_legendre(80);
  for (BasisTag tag : {BasisTag::FourierPeriodic, BasisTag::CosineSymmetric, BasisTag::ZeroLocationFourier}) {
    for (int trial = 0; trial < 10; ++trial) {
      const BasisId b(tag, 12);
      const auto f = random_function(b, rng), g = random_function(b, rng);
      const double quad =
          integrate(rule, -0.5, 0.5, [&](double t) { return evaluate(f, t) * evaluate(g, t); });
      CHECK(inner_product(f, g) == doctest::Approx(quad).epsilon(1e-11));
    }
  }
}

TEST_CASE("projection is idempotent and kills the location") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_function(BasisId(BasisTag::FourierPeriodic, 20), rng);
    const auto p = project_zero_location(f);
    const auto pp = project_zero_location(p);
    CHECK((pp.coeffs - p.coeffs).norm() <= 1e-14 * l2_norm(f));
    CHECK(std::abs(inner_product(p, sawtooth(20))) <= 1e-12 * l2_norm(f));
  }
}

TEST_CASE("sobolev norm is monotone in r") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_function(BasisId(BasisTag::FourierPeriodic, 10), rng);
    double prev = 0.0;
    for (double r : {0.0, 0.25, 0.5, 1.0, 1.5, 3.0}) {
      const double v = sobolev_norm(f, r);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("cosine representations are even") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const auto f = random_function(BasisId(BasisTag::CosineSymmetric, 15), rng);
  for (int i = 0; i < 100; ++i) {
    const double t = u(rng);
    CHECK(evaluate(f, t) == doctest::Approx(evaluate(f, -t)).epsilon(1e-13));
  }
}

TEST_CASE("zero-location basis is orthonormal and orthogonal to the sawtooth") {
  for (SineOrder order : {SineOrder::Forward, SineOrder::Reverse}) {
    const BasisId b(BasisTag::ZeroLocationFourier, 24, order);
    const Eigen::MatrixXd E = fourier_embedding(b);
    CHECK((E.transpose() * E - Eigen::MatrixXd::Identity(b.dimension(), b.dimension())).norm() < 1e-12);
    const Eigen::VectorXd s = sawtooth(24).coeffs;
    CHECK((E.transpose() * s).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("zero-location basis matches explicit Gram-Schmidt") {
  const int K = 16;
  const Eigen::VectorXd sfull = sawtooth(K).coeffs;
  Eigen::VectorXd u(K);
  for (int k = 1; k <= K; ++k) u(k - 1) = sfull(2 * k);
  u.normalize();
  std::vector<Eigen::VectorXd> done{u};
  const Eigen::MatrixXd E = fourier_embedding(BasisId(BasisTag::ZeroLocationFourier, K));
  for (int j = 0; j < K - 1; ++j) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(K, j);
    for (const auto& q : done) v -= q.dot(v) * q;
    v.normalize();
    done.push_back(v);
    Eigen::VectorXd col(K);
    for (int k = 1; k <= K; ++k) col(k - 1) = E(2 * k, K + 1 + j);
    CHECK((col - v).norm() < 1e-12);
  }
}

TEST_CASE("from_fourier and to_fourier round trip") {
  std::mt19937_64 rng(17);
  for (BasisTag tag : {BasisTag::CosineSymmetric, BasisTag::ZeroLocationFourier}) {
    for (SineOrder order : {SineOrder::Forward, SineOrder::Reverse}) {
      const BasisId b(tag, 9, order);
      const auto f = random_function(b, rng);
      const auto back = from_fourier(to_fourier(f), b);
      CHECK((back.coeffs - f.coeffs).norm() < 1e-13);
    }
  }
}

TEST_CASE("zernike constant and normalization") {
  for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{0.3, -0.4}, std::pair{-1.0, 0.0}})
    CHECK(std::abs(zernike_eval(0, 0, x, y) - 1.0 / std::sqrt(kPi)) < 1e-15);
  CHECK_THROWS_AS(zernike_eval(1, 0, 0.9, 0.9), Error);

  const int kmax = 6;
  const int D = zernike_dimension(kmax);
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(D, D);
  std::vector<std::complex<double>> v(static_cast<std::size_t>(D));
  const auto rule = gauss_legendre(30);
  for (int i = 0; i < 30; ++i) {
    const double r = 0.5 * (rule.nodes[i] + 1.0), wr = 0.5 * rule.weights[i] * r;
    for (int j = 0; j < 40; ++j) {
      const double phi = 2.0 * kPi * j / 40;
      zernike_values(kmax, r * std::cos(phi), r * std::sin(phi), v.data());
      const Eigen::Map<Eigen::VectorXcd> z(v.data(), D);
      gram += wr * (2.0 * kPi / 40) * (z.conjugate() * z.transpose());
    }
  }
  CHECK((gram - Eigen::MatrixXcd::Identity(D, D)).norm() < 1e-12);

  const auto cross = disk_integral([](double x, double y) {
    return zernike_eval(2, 1, x, y) * std::conj(zernike_eval(3, 0, x, y));
  });
  CHECK(std::abs(cross) < 1e-12);
}

TEST_CASE("zernike radial recurrence matches the factorial sum") {
  for (int n = 0; n <= 12; ++n)
    for (int m = n % 2; m <= n; m += 2)
      for (double r : {0.0, 0.1, 0.37, 0.8, 1.0})
        CHECK(zernike_radial(n, m, r) == doctest::Approx(radial_factorial(n, m, r)).epsilon(1e-11));
}

TEST_CASE("zernike index bookkeeping") {
  for (int k = 0; k <= 8; ++k)
    for (int l = 0; l <= k; ++l) {
      const auto [kk, ll] = zernike_degree_order(zernike_index(k, l));
      CHECK(kk == k);
      CHECK(ll == l);
    }
}

TEST_CASE("zernike sobolev norm examples") {
  const BasisId b(BasisTag::ZernikeDisk, 3);
  CHECK(zernike_sobolev_norm(CoefficientFunction(b), 1.0) == 0.0);
  CoefficientFunction f(b);
  f.coeffs(2 * zernike_index(1, 0)) = 1.0;
  CHECK(zernike_sobolev_norm(f, 1.0) == doctest::Approx(2.0));
  std::mt19937_64 rng(21);
  const auto g = random_function(b, rng);
  CHECK(zernike_sobolev_norm(g, 0.0) == doctest::Approx(l2_norm(g)));
}

TEST_CASE("coefficient tables round trip exactly") {
  std::mt19937_64 rng(23);
  for (const BasisId b : {BasisId(BasisTag::ZeroLocationFourier, 7, SineOrder::Reverse),
                          BasisId(BasisTag::ZernikeDisk, 4)}) {
    const auto f = random_function(b, rng);
    std::stringstream ss;
    write_table(ss, coefficient_table(f));
    const auto g = coefficients_from_table(read_table(ss));
    CHECK(g.basis == f.basis);
    CHECK(g.coeffs == f.coeffs);
  }
}
