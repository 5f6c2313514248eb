#include "bvmlab/xray_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bvmlab/error.hpp"
#include "bvmlab/quadrature.hpp"

namespace bvmlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBoundaryMeasure = 4.0 * kPi;

double smoothstep3(double x) {
  const double x4 = x * x * x * x;
  return x4 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)));
}

// Chord parameters where the line crosses the circle of radius rho.
void crossings(const BoundaryLine& line, double rho, std::vector<double>& out) {
  const double c = std::cos(line.alpha), s = std::sin(line.alpha);
  const double disc = rho * rho - s * s;
  if (disc <= 0.0) return;
  const double h = std::sqrt(disc);
  out.push_back(c - h);
  out.push_back(c + h);
}

double chi_integral(const ChiProfile& chi, const BoundaryLine& line, double s0, double s1) {
  if (s1 <= s0 || chi.outer <= 0.0) return 0.0;
  std::vector<double> cuts{s0, s1};
  crossings(line, chi.inner, cuts);
  crossings(line, chi.outer, cuts);
  std::sort(cuts.begin(), cuts.end());
  const auto x = line.entry();
  const auto v = line.direction();
  auto integrand = [&](double s) { return chi(std::hypot(x[0] + s * v[0], x[1] + s * v[1])); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::max(cuts[i], s0), b = std::min(cuts[i + 1], s1);
    if (b > a) total += integrate_adaptive(integrand, a, b, 1e-14, 30);
  }
  return total;
}

struct ChordNodes {
  std::vector<double> s, w, a;
};

ChordNodes chord_nodes(const BoundaryLine& line, const ChiProfile& chi, const GaussRule& rule) {
  const double tau = line.tau();
  const std::size_t m = rule.nodes.size();
  ChordNodes c;
  c.s.resize(m);
  c.w.resize(m);
  c.a.resize(m);
  double prev = 0.0, acc = 0.0;
  for (std::size_t q = 0; q < m; ++q) {
    c.s[q] = 0.5 * tau * (1.0 + rule.nodes[q]);
    c.w[q] = 0.5 * tau * rule.weights[q];
    acc += chi_integral(chi, line, prev, c.s[q]);
    c.a[q] = acc;
    prev = c.s[q];
  }
  return c;
}

void require_zernike(const CoefficientFunction& f) {
  if (f.basis.tag != BasisTag::ZernikeDisk) fail(ErrorCode::BasisMismatch, "X-ray operators need ZernikeDisk");
}

// Per-line quadrature of f e^{-i theta A} (times -i A when derivative).
CVector line_transform(const Attenuation& att, const CoefficientFunction& f, const LineGrid& grid,
                       int order, bool derivative) {
  require_zernike(f);
  const GaussRule rule = gauss_legendre(order);
  CVector out(grid.size());
#pragma omp parallel for schedule(static)
  for (int l = 0; l < grid.size(); ++l) {
    const auto& line = grid.lines[static_cast<std::size_t>(l)];
    const auto nodes = chord_nodes(line, att.chi, rule);
    std::complex<double> sum = 0.0;
    for (std::size_t q = 0; q < nodes.s.size(); ++q) {
      const auto p = chord_point(line, nodes.s[q]);
      std::complex<double> term = evaluate_disk(f, p[0], p[1]) * std::polar(1.0, -att.theta * nodes.a[q]);
      if (derivative) term *= std::complex<double>(0.0, -nodes.a[q]);
      sum += nodes.w[q] * term;
    }
    out(l) = sum;
  }
  return out;
}

void check_grid(const LineGrid& grid) {
  const double total = grid.total_weight();
  if (std::abs(total - kBoundaryMeasure) > 0.01 * kBoundaryMeasure)
    fail(ErrorCode::GridTooCoarse, "line grid weight sum " + std::to_string(total) +
                                       " deviates more than 1% from 4 pi");
}

}  // namespace

BoundaryLine::BoundaryLine(double b, double a) : beta(b), alpha(a) {
  if (!(a > -kPi / 2 && a < kPi / 2)) fail(ErrorCode::InvalidArgument, "line angle alpha must lie in (-pi/2, pi/2)");
}

double BoundaryLine::tau() const { return 2.0 * std::cos(alpha); }

Point2 BoundaryLine::entry() const { return {std::cos(beta), std::sin(beta)}; }

Point2 BoundaryLine::direction() const {
  const double ang = beta + kPi + alpha;
  return {std::cos(ang), std::sin(ang)};
}

LineGrid LineGrid::make(int nbeta, int nalpha) {
  if (nbeta < 1 || nalpha < 1) fail(ErrorCode::InvalidArgument, "line grid sizes must be positive");
  LineGrid g;
  g.nbeta = nbeta;
  g.nalpha = nalpha;
  const GaussRule rule = gauss_legendre(nalpha);
  const double db = 2.0 * kPi / nbeta;
  for (int i = 0; i < nbeta; ++i) {
    for (int j = 0; j < nalpha; ++j) {
      const double alpha = 0.5 * kPi * rule.nodes[static_cast<std::size_t>(j)];
      g.lines.emplace_back(i * db, alpha);
      g.weights.push_back(db * 0.5 * kPi * rule.weights[static_cast<std::size_t>(j)] * std::cos(alpha));
    }
  }
  return g;
}

double LineGrid::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double ChiProfile::operator()(double r) const {
  if (outer <= 0.0) return 0.0;
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  return 1.0 - smoothstep3((r - inner) / (outer - inner));
}

Point2 chord_point(const BoundaryLine& line, double t) {
  const double tau = line.tau();
  if (t < -1e-14 || t > tau + 1e-14) fail(ErrorCode::InvalidArgument, "chord parameter outside [0, tau]");
  const auto x = line.entry();
  const auto v = line.direction();
  return {x[0] + t * v[0], x[1] + t * v[1]};
}

double a_chi(const Attenuation& att, const BoundaryLine& line, double t) {
  if (t < 0.0 || t > line.tau() + 1e-14) fail(ErrorCode::InvalidArgument, "chord parameter outside [0, tau]");
  return chi_integral(att.chi, line, 0.0, t);
}

CVector apply_K0(const CoefficientFunction& f, const LineGrid& grid, int chord_order) {
  return line_transform(Attenuation{0.0, ChiProfile{0.0, 0.0}}, f, grid, chord_order, false);
}

CVector apply_Ktheta(const Attenuation& att, const CoefficientFunction& f, const LineGrid& grid,
                     int chord_order) {
  return line_transform(att, f, grid, chord_order, false);
}

CVector apply_Ktheta_dot(const Attenuation& att, const CoefficientFunction& f, const LineGrid& grid,
                         int chord_order) {
  return line_transform(att, f, grid, chord_order, true);
}

XrayGeometry::XrayGeometry(int kmax, LineGrid grid, ChiProfile chi, int chord_order)
    : kmax_(kmax), D_(zernike_dimension(kmax)), order_(chord_order), grid_(std::move(grid)), chi_(chi) {
  if (kmax < 1) fail(ErrorCode::InvalidArgument, "kmax must be >= 1");
  check_grid(grid_);
  const GaussRule rule = gauss_legendre(order_);
  const std::size_t L = grid_.lines.size(), m = static_cast<std::size_t>(order_);
  chord_w_.resize(L * m);
  atten_.resize(L * m);
  zvals_.resize(L * m * static_cast<std::size_t>(D_));
#pragma omp parallel for schedule(static)
  for (std::size_t l = 0; l < L; ++l) {
    const auto& line = grid_.lines[l];
    const auto nodes = chord_nodes(line, chi_, rule);
    const double sw = std::sqrt(grid_.weights[l]);
    for (std::size_t q = 0; q < m; ++q) {
      chord_w_[l * m + q] = sw * nodes.w[q];
      atten_[l * m + q] = nodes.a[q];
      const auto p = chord_point(line, nodes.s[q]);
      zernike_values(kmax_, p[0], p[1], &zvals_[(l * m + q) * static_cast<std::size_t>(D_)]);
    }
  }
}

void XrayGeometry::matrices(double theta, Eigen::MatrixXcd& A, Eigen::MatrixXcd* Adot) const {
  const int L = grid_.size();
  const std::size_t m = static_cast<std::size_t>(order_);
  A.setZero(L, D_);
  if (Adot) Adot->setZero(L, D_);
#pragma omp parallel
  {
    std::vector<std::complex<double>> row(static_cast<std::size_t>(D_)), drow(static_cast<std::size_t>(D_));
#pragma omp for schedule(static)
    for (int l = 0; l < L; ++l) {
      std::fill(row.begin(), row.end(), 0.0);
      std::fill(drow.begin(), drow.end(), 0.0);
      for (std::size_t q = 0; q < m; ++q) {
        const std::size_t idx = static_cast<std::size_t>(l) * m + q;
        const double a = atten_[idx];
        const std::complex<double> p = chord_w_[idx] * std::polar(1.0, -theta * a);
        const std::complex<double> dp = p * std::complex<double>(0.0, -a);
        const std::complex<double>* z = &zvals_[idx * static_cast<std::size_t>(D_)];
        for (int j = 0; j < D_; ++j) row[j] += p * z[j];
        if (Adot)
          for (int j = 0; j < D_; ++j) drow[j] += dp * z[j];
      }
      for (int j = 0; j < D_; ++j) A(l, j) = row[j];
      if (Adot)
        for (int j = 0; j < D_; ++j) (*Adot)(l, j) = drow[j];
    }
  }
}

Eigen::MatrixXcd XrayGeometry::matrix(double theta) const {
  Eigen::MatrixXcd A;
  matrices(theta, A, nullptr);
  return A;
}

Eigen::MatrixXcd XrayGeometry::derivative_matrix(double theta) const {
  Eigen::MatrixXcd A, Adot;
  matrices(theta, A, &Adot);
  return Adot;
}

Eigen::MatrixXcd assemble_matrix(const Attenuation& att, const BasisId& basis, const LineGrid& grid,
                                 int chord_order) {
  if (basis.tag != BasisTag::ZernikeDisk) fail(ErrorCode::BasisMismatch, "assemble_matrix needs ZernikeDisk");
  return XrayGeometry(basis.truncation, grid, att.chi, chord_order).matrix(att.theta);
}

CoefficientFunction backproject(const Eigen::MatrixXcd& A, const BasisId& basis, const LineGrid& grid,
                                const CVector& h) {
  if (h.size() != grid.size() || A.rows() != grid.size())
    fail(ErrorCode::InvalidArgument, "backproject: data does not match the line grid");
  CVector scaled(h.size());
  for (int l = 0; l < h.size(); ++l) scaled(l) = std::sqrt(grid.weights[static_cast<std::size_t>(l)]) * h(l);
  return CoefficientFunction(basis, to_pairs(A.adjoint() * scaled));
}

CoefficientFunction backproject(const Attenuation& att, const BasisId& basis, const LineGrid& grid,
                                const CVector& h, int chord_order) {
  return backproject(assemble_matrix(att, basis, grid, chord_order), basis, grid, h);
}

CVector to_complex(const Eigen::VectorXd& pairs) {
  CVector z(pairs.size() / 2);
  for (int i = 0; i < z.size(); ++i) z(i) = {pairs(2 * i), pairs(2 * i + 1)};
  return z;
}

Eigen::VectorXd to_pairs(const CVector& z) {
  Eigen::VectorXd v(2 * z.size());
  for (int i = 0; i < z.size(); ++i) {
    v(2 * i) = z(i).real();
    v(2 * i + 1) = z(i).imag();
  }
  return v;
}

Eigen::MatrixXd realify(const Eigen::MatrixXcd& A) {
  Eigen::MatrixXd R(2 * A.rows(), 2 * A.cols());
  for (int j = 0; j < A.cols(); ++j) {
    for (int i = 0; i < A.rows(); ++i) {
      const double ar = A(i, j).real(), ai = A(i, j).imag();
      R(2 * i, 2 * j) = ar;
      R(2 * i, 2 * j + 1) = -ai;
      R(2 * i + 1, 2 * j) = ai;
      R(2 * i + 1, 2 * j + 1) = ar;
    }
  }
  return R;
}

}  // namespace bvmlab
