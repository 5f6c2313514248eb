#include "bvmlab/spectral.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/trigamma.hpp>

#include "bvmlab/error.hpp"

namespace bvmlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

int fourier_dim(int K) { return 2 * K + 1; }
int cos_index(int k) { return k == 0 ? 0 : 2 * k - 1; }
int sin_index(int k) { return 2 * k; }

// Sawtooth sine coordinates normalized to a unit vector, in processing order.
Eigen::VectorXd sawtooth_direction(int K, SineOrder order) {
  Eigen::VectorXd u(K);
  for (int k = 1; k <= K; ++k) u(k - 1) = sawtooth_coefficient(k);
  u.normalize();
  if (order == SineOrder::Reverse) u.reverseInPlace();
  return u;
}

// Suffix sums t_j = sum_{i >= j} u_i^2 and norms of the orthogonalized sines.
// v_j = e_j - (u_j / t_j) P_{>=j} u is the Gram-Schmidt image of e_j against
// {u, e_1, ..., e_{j-1}}; |v_j|^2 = 1 - u_j^2 / t_j.
struct ZeroLocationFactors {
  Eigen::VectorXd u, tail, norm;
};

ZeroLocationFactors zero_location_factors(int K, SineOrder order) {
  ZeroLocationFactors z;
  z.u = sawtooth_direction(K, order);
  z.tail.resize(K);
  double acc = 0.0;
  for (int i = K - 1; i >= 0; --i) {
    acc += z.u(i) * z.u(i);
    z.tail(i) = acc;
  }
  z.norm.resize(std::max(K - 1, 0));
  for (int j = 0; j < K - 1; ++j)
    z.norm(j) = std::sqrt(std::max(0.0, 1.0 - z.u(j) * z.u(j) / z.tail(j)));
  return z;
}

// Sine coordinates (length K, frequency order) from modified-sine coordinates.
Eigen::VectorXd modified_to_sines(const Eigen::VectorXd& c, int K, SineOrder order) {
  const auto z = zero_location_factors(K, order);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(K);
  double prefix = 0.0;
  for (int i = 0; i < K; ++i) {
    if (i < K - 1) {
      const double cj = c(i) / z.norm(i);
      x(i) += cj;
      prefix += cj * z.u(i) / z.tail(i);
    }
    x(i) -= z.u(i) * prefix;
  }
  if (order == SineOrder::Reverse) x.reverseInPlace();
  return x;
}

Eigen::VectorXd sines_to_modified(Eigen::VectorXd x, int K, SineOrder order) {
  const auto z = zero_location_factors(K, order);
  if (order == SineOrder::Reverse) x.reverseInPlace();
  Eigen::VectorXd c(std::max(K - 1, 0));
  double suffix = 0.0;
  for (int j = K - 1; j >= 0; --j) {
    suffix += z.u(j) * x(j);
    if (j < K - 1) c(j) = (x(j) - z.u(j) / z.tail(j) * suffix) / z.norm(j);
  }
  return c;
}

}  // namespace

std::string to_string(BasisTag tag) {
  switch (tag) {
    case BasisTag::FourierPeriodic: return "FourierPeriodic";
    case BasisTag::CosineSymmetric: return "CosineSymmetric";
    case BasisTag::ZeroLocationFourier: return "ZeroLocationFourier";
    case BasisTag::ZernikeDisk: return "ZernikeDisk";
  }
  return "?";
}

BasisTag parse_basis_tag(const std::string& text) {
  for (auto t : {BasisTag::FourierPeriodic, BasisTag::CosineSymmetric,
                 BasisTag::ZeroLocationFourier, BasisTag::ZernikeDisk})
    if (text == to_string(t)) return t;
  fail(ErrorCode::InvalidArgument, "unknown basis tag '" + text + "'");
}

BasisId::BasisId(BasisTag t, int k, SineOrder o) : tag(t), truncation(k), order(o) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "basis truncation must be >= 1");
}

int BasisId::dimension() const {
  const int K = truncation;
  switch (tag) {
    case BasisTag::FourierPeriodic: return 2 * K + 1;
    case BasisTag::CosineSymmetric: return K + 1;
    case BasisTag::ZeroLocationFourier: return 2 * K;
    case BasisTag::ZernikeDisk: return 2 * zernike_dimension(K);
  }
  return 0;
}

int BasisId::level(int i) const {
  const int K = truncation;
  switch (tag) {
    case BasisTag::FourierPeriodic: return (i + 1) / 2;
    case BasisTag::CosineSymmetric: return i;
    case BasisTag::ZeroLocationFourier: {
      if (i <= K) return i;
      const int j = i - K;  // j-th modified sine in processing order
      return order == SineOrder::Forward ? j : K + 1 - j;
    }
    case BasisTag::ZernikeDisk: return zernike_degree_order(i / 2).first;
  }
  return 0;
}

CoefficientFunction::CoefficientFunction(const BasisId& b)
    : basis(b), coeffs(Eigen::VectorXd::Zero(b.dimension())) {}

CoefficientFunction::CoefficientFunction(const BasisId& b, Eigen::VectorXd c)
    : basis(b), coeffs(std::move(c)) {
  if (coeffs.size() != b.dimension())
    fail(ErrorCode::InvalidArgument, "coefficient length " + std::to_string(coeffs.size()) +
                                         " does not match basis dimension " +
                                         std::to_string(b.dimension()));
}

void require_same_basis(const CoefficientFunction& f, const CoefficientFunction& g) {
  if (!(f.basis == g.basis))
    fail(ErrorCode::BasisMismatch,
         "basis mismatch: " + to_string(f.basis.tag) + "/" + std::to_string(f.basis.truncation) +
             " vs " + to_string(g.basis.tag) + "/" + std::to_string(g.basis.truncation));
}

double inner_product(const CoefficientFunction& f, const CoefficientFunction& g) {
  require_same_basis(f, g);
  // Real part of the Hermitian product; for complex pairs Re(a conj b) = ar br + ai bi.
  return f.coeffs.dot(g.coeffs);
}

double l2_norm(const CoefficientFunction& f) { return f.coeffs.norm(); }

double sobolev_norm(const CoefficientFunction& f, double r) {
  if (!f.basis.periodic()) fail(ErrorCode::BasisMismatch, "sobolev_norm needs a periodic basis");
  const auto F = to_fourier(f);
  double sum = 0.0;
  for (int i = 0; i < F.coeffs.size(); ++i) {
    const double k = F.basis.level(i);
    // The |k|^{2r} term only counts for k != 0, so the weight is monotone in r.
    const double w = r >= 0 ? 1.0 + (k > 0 ? std::pow(k, 2.0 * r) : 0.0) : std::pow(1.0 + k, 2.0 * r);
    sum += w * F.coeffs(i) * F.coeffs(i);
  }
  return std::sqrt(sum);
}

double sawtooth_coefficient(int k) {
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return kSqrt2 * sign / (2.0 * kPi * k);
}

double sawtooth_tail_mass(int K) {
  return boost::math::trigamma(static_cast<double>(K) + 1.0) / (2.0 * kPi * kPi);
}

CoefficientFunction sawtooth(int K) {
  CoefficientFunction s(BasisId(BasisTag::FourierPeriodic, K));
  for (int k = 1; k <= K; ++k) s.coeffs(sin_index(k)) = sawtooth_coefficient(k);
  return s;
}

CoefficientFunction to_fourier(const CoefficientFunction& f) {
  const int K = f.basis.truncation;
  switch (f.basis.tag) {
    case BasisTag::FourierPeriodic: return f;
    case BasisTag::CosineSymmetric: {
      CoefficientFunction out(BasisId(BasisTag::FourierPeriodic, K));
      for (int k = 0; k <= K; ++k) out.coeffs(cos_index(k)) = f.coeffs(k);
      return out;
    }
    case BasisTag::ZeroLocationFourier: {
      CoefficientFunction out(BasisId(BasisTag::FourierPeriodic, K));
      for (int k = 0; k <= K; ++k) out.coeffs(cos_index(k)) = f.coeffs(k);
      const Eigen::VectorXd x = modified_to_sines(f.coeffs.tail(K - 1), K, f.basis.order);
      for (int k = 1; k <= K; ++k) out.coeffs(sin_index(k)) = x(k - 1);
      return out;
    }
    case BasisTag::ZernikeDisk: break;
  }
  fail(ErrorCode::BasisMismatch, "to_fourier needs a periodic basis");
}

CoefficientFunction from_fourier(const CoefficientFunction& f, const BasisId& target) {
  if (f.basis.tag != BasisTag::FourierPeriodic || !target.periodic())
    fail(ErrorCode::BasisMismatch, "from_fourier needs Fourier input and a periodic target");
  const int Kin = f.basis.truncation, K = target.truncation;
  // Re-truncate (zero-pad or cut) to the target frequency range first.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(fourier_dim(K));
  const int common = std::min(fourier_dim(K), fourier_dim(Kin));
  x.head(common) = f.coeffs.head(common);
  CoefficientFunction out(target);
  switch (target.tag) {
    case BasisTag::FourierPeriodic: out.coeffs = x; break;
    case BasisTag::CosineSymmetric:
      for (int k = 0; k <= K; ++k) out.coeffs(k) = x(cos_index(k));
      break;
    case BasisTag::ZeroLocationFourier: {
      for (int k = 0; k <= K; ++k) out.coeffs(k) = x(cos_index(k));
      Eigen::VectorXd s(K);
      for (int k = 1; k <= K; ++k) s(k - 1) = x(sin_index(k));
      out.coeffs.tail(K - 1) = sines_to_modified(s, K, target.order);
      break;
    }
    case BasisTag::ZernikeDisk: break;
  }
  return out;
}

Eigen::MatrixXd fourier_embedding(const BasisId& basis) {
  const int d = basis.dimension();
  Eigen::MatrixXd E(fourier_dim(basis.truncation), d);
  for (int i = 0; i < d; ++i) {
    CoefficientFunction e(basis);
    e.coeffs(i) = 1.0;
    E.col(i) = to_fourier(e).coeffs;
  }
  return E;
}

CoefficientFunction project_zero_location(const CoefficientFunction& f) {
  if (!f.basis.periodic()) fail(ErrorCode::BasisMismatch, "project_zero_location needs a periodic basis");
  if (f.basis.tag != BasisTag::FourierPeriodic) return f;  // already orthogonal to S
  const auto s = sawtooth(f.basis.truncation);
  const double c = inner_product(f, s) / inner_product(s, s);
  return CoefficientFunction(f.basis, f.coeffs - c * s.coeffs);
}

double evaluate(const CoefficientFunction& f, double t) {
  const auto F = to_fourier(f);
  double v = F.coeffs(0);
  for (int k = 1; k <= F.basis.truncation; ++k) {
    const double a = 2.0 * kPi * k * t;
    v += kSqrt2 * (F.coeffs(cos_index(k)) * std::cos(a) + F.coeffs(sin_index(k)) * std::sin(a));
  }
  return v;
}

CoefficientFunction derivative(const CoefficientFunction& f) {
  const auto F = to_fourier(f);
  CoefficientFunction d(F.basis);
  for (int k = 1; k <= F.basis.truncation; ++k) {
    const double w = 2.0 * kPi * k;
    d.coeffs(cos_index(k)) = w * F.coeffs(sin_index(k));
    d.coeffs(sin_index(k)) = -w * F.coeffs(cos_index(k));
  }
  return d;
}

int zernike_dimension(int kmax) { return (kmax + 1) * (kmax + 2) / 2; }

int zernike_index(int k, int l) {
  if (k < 0 || l < 0 || l > k) fail(ErrorCode::InvalidArgument, "zernike index needs 0 <= l <= k");
  return k * (k + 1) / 2 + l;
}

std::pair<int, int> zernike_degree_order(int j) {
  int k = 0;
  while ((k + 1) * (k + 2) / 2 <= j) ++k;
  return {k, j - k * (k + 1) / 2};
}

namespace {

// R[n][m] for 0 <= m <= n <= kmax; zero when n - m is odd.
std::vector<double> radial_table(int kmax, double r) {
  const int w = kmax + 1;
  std::vector<double> R(static_cast<std::size_t>(w * w), 0.0);
  auto at = [&](int n, int m) -> double& { return R[static_cast<std::size_t>(n * w + m)]; };
  double rn = 1.0;
  for (int n = 0; n <= kmax; ++n) {
    at(n, n) = rn;
    rn *= r;
    for (int m = n - 2; m >= 0; m -= 2) {
      const double lower = m <= n - 2 ? at(n - 2, m) : 0.0;
      at(n, m) = r * (at(n - 1, std::abs(m - 1)) + at(n - 1, m + 1)) - lower;
    }
  }
  return R;
}

}  // namespace

double zernike_radial(int n, int m, double r) {
  m = std::abs(m);
  if (m > n || (n - m) % 2 != 0) return 0.0;
  return radial_table(n, r)[static_cast<std::size_t>(n * (n + 1) + m)];
}

void zernike_values(int kmax, double x, double y, std::complex<double>* out) {
  const double r = std::hypot(x, y);
  if (r > 1.0 + 1e-12) fail(ErrorCode::InvalidArgument, "zernike point outside the closed disk");
  const auto R = radial_table(kmax, std::min(r, 1.0));
  const std::complex<double> unit = r > 0.0 ? std::complex<double>(x / r, y / r) : 1.0;
  std::vector<std::complex<double>> pw(static_cast<std::size_t>(kmax + 1));
  pw[0] = 1.0;
  for (int m = 1; m <= kmax; ++m) pw[m] = pw[m - 1] * unit;
  const int w = kmax + 1;
  for (int k = 0; k <= kmax; ++k) {
    const double c = std::sqrt((k + 1.0) / kPi);
    for (int l = 0; l <= k; ++l) {
      const int m = k - 2 * l, am = std::abs(m);
      const std::complex<double> phase = m >= 0 ? pw[am] : std::conj(pw[am]);
      const double sign = (l % 2 == 0) ? 1.0 : -1.0;
      out[zernike_index(k, l)] = sign * c * R[static_cast<std::size_t>(k * w + am)] * phase;
    }
  }
}

std::complex<double> zernike_eval(int k, int l, double x, double y) {
  if (l < 0 || l > k) fail(ErrorCode::InvalidArgument, "zernike_eval needs 0 <= l <= k");
  std::vector<std::complex<double>> v(static_cast<std::size_t>(zernike_dimension(k)));
  zernike_values(k, x, y, v.data());
  return v[zernike_index(k, l)];
}

std::complex<double> evaluate_disk(const CoefficientFunction& f, double x, double y) {
  if (f.basis.tag != BasisTag::ZernikeDisk) fail(ErrorCode::BasisMismatch, "evaluate_disk needs ZernikeDisk");
  const int D = zernike_dimension(f.basis.truncation);
  std::vector<std::complex<double>> v(static_cast<std::size_t>(D));
  zernike_values(f.basis.truncation, x, y, v.data());
  std::complex<double> s = 0.0;
  for (int j = 0; j < D; ++j) s += std::complex<double>(f.coeffs(2 * j), f.coeffs(2 * j + 1)) * v[j];
  return s;
}

double zernike_sobolev_norm(const CoefficientFunction& f, double s) {
  if (f.basis.tag != BasisTag::ZernikeDisk)
    fail(ErrorCode::BasisMismatch, "zernike_sobolev_norm needs ZernikeDisk");
  double sum = 0.0;
  for (int i = 0; i < f.coeffs.size(); ++i)
    sum += std::pow(1.0 + f.basis.level(i), 2.0 * s) * f.coeffs(i) * f.coeffs(i);
  return std::sqrt(sum);
}

}  // namespace bvmlab
