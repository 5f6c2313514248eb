#include "bvmlab/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "bvmlab/error.hpp"
#include "bvmlab/quadrature.hpp"

namespace bvmlab {

namespace {

constexpr double kConditionCap = 1e12;

double condition_number(const Eigen::MatrixXd& G) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

LfdSolution lfd_solve(const ForwardModel& model, const CoefficientFunction& f0) {
  const Eigen::VectorXd d = model.apply_dot(f0);
  const Eigen::MatrixXd G = model.K.transpose() * model.K;
  LfdSolution sol;
  sol.condition = condition_number(G);
  if (!(sol.condition <= kConditionCap)) {
    std::ostringstream os;
    os << "Gram matrix of K h_j is rank deficient: condition number " << sol.condition << " exceeds 1e12";
    fail(ErrorCode::RankDeficient, os.str());
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(model.K);
  sol.gamma = CoefficientFunction(model.basis, qr.solve(d));
  const Eigen::VectorXd kg = model.K * sol.gamma.coeffs;
  const Eigen::VectorXd r = d - kg;
  sol.residual = (model.K.transpose() * r).cwiseAbs().maxCoeff();
  sol.info = d.squaredNorm() - kg.squaredNorm();
  sol.info_residual = r.squaredNorm();
  return sol;
}

LfdSweep lfd_sweep(const ModelFamily& coarse, const ModelFamily& fine, const CoefficientFunction& f0,
                   double theta0) {
  LfdSweep s;
  s.info_coarse = lfd_solve(coarse.realize(theta0), coarse.restrict(f0)).info;
  s.info_fine = lfd_solve(fine.realize(theta0), fine.restrict(f0)).info;
  s.relative_change = std::abs(s.info_fine - s.info_coarse) / std::max(std::abs(s.info_coarse), 1e-300);
  s.flagged = s.relative_change > 5e-3;
  return s;
}

double location_lambda(const CoefficientFunction& f0) {
  const auto d = derivative(f0);
  return 12.0 * inner_product(d, sawtooth(d.basis.truncation));
}

double location_lambda_quadrature(const CoefficientFunction& f0) {
  const auto d = derivative(f0);
  const GaussRule rule = gauss_legendre(std::max(64, 4 * d.basis.truncation + 32));
  return 12.0 * integrate(rule, -0.5, 0.5, [&](double t) { return evaluate(d, t) * t; });
}

double location_lambda_endpoint(const CoefficientFunction& f0) {
  const GaussRule rule = gauss_legendre(std::max(64, 4 * f0.basis.truncation + 32));
  const double mean = integrate(rule, -0.5, 0.5, [&](double t) { return evaluate(f0, t); });
  return 12.0 * (evaluate(f0, 0.5) - mean);
}

CoefficientFunction lfd_model2_closed(const CoefficientFunction& f0, int m, const ConvolutionKernel& kernel) {
  if (m < 0) fail(ErrorCode::InvalidArgument, "convolution power m must be >= 0");
  const int K = kernel.truncation();
  const auto F = from_fourier(to_fourier(f0), BasisId(BasisTag::FourierPeriodic, K));
  const double lambda = location_lambda(F);
  const auto smoothed = convolve(kernel, sawtooth(K), m);
  return CoefficientFunction(F.basis, -derivative(F).coeffs + lambda * smoothed.coeffs);
}

InfoForms info_forms(const Eigen::VectorXd& d, const Eigen::VectorXd& kg) {
  return InfoForms{(d - kg).squaredNorm(), d.squaredNorm() - kg.squaredNorm()};
}

InfoForms efficient_info(const ForwardModel& model, const CoefficientFunction& f0,
                         const CoefficientFunction& gamma, double tol) {
  const Eigen::VectorXd d = model.apply_dot(f0);
  const auto forms = info_forms(d, model.apply(gamma));
  if (std::abs(forms.residual_form - forms.difference_form) > tol * std::max(1.0, d.squaredNorm())) {
    std::ostringstream os;
    os << "gamma is not a least favourable direction: |d-Kg|^2 = " << forms.residual_form
       << " but |d|^2-|Kg|^2 = " << forms.difference_form;
    fail(ErrorCode::InvalidLfd, os.str());
  }
  return forms;
}

double recentering_delta(const ForwardModel& model, const CoefficientFunction& f0,
                         const CoefficientFunction& gamma, double info, const Eigen::VectorXd& noise) {
  if (!(info > 0.0)) fail(ErrorCode::InvalidArgument, "efficient information must be positive");
  const Eigen::VectorXd r = model.apply_dot(f0) - model.apply(gamma);
  if (noise.size() != r.size()) fail(ErrorCode::InvalidArgument, "noise length does not match the model");
  return r.dot(noise) / info;
}

std::vector<DecenteringRow> decentering_profile(const CoefficientFunction& gamma,
                                                const Eigen::VectorXd& rkhs_weights, const LinearMap& A,
                                                const std::vector<double>& eps_grid) {
  const Eigen::Index d = gamma.coeffs.size();
  if (rkhs_weights.size() != d) fail(ErrorCode::InvalidArgument, "RKHS weights do not match gamma");
  if ((rkhs_weights.array() <= 0.0).any()) fail(ErrorCode::InvalidArgument, "RKHS weights must be positive");
  int top = 0;
  for (Eigen::Index i = 0; i < d; ++i) top = std::max(top, gamma.basis.level(static_cast<int>(i)));
  std::vector<double> psi(static_cast<std::size_t>(top + 1), 0.0), mass(psi.size(), 0.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto k = static_cast<std::size_t>(gamma.basis.level(static_cast<int>(i)));
    psi[k] += rkhs_weights(i) * gamma.coeffs(i) * gamma.coeffs(i);
    mass[k] += gamma.coeffs(i) * gamma.coeffs(i);
  }
  // psi(K) cumulative from below, err(K)^2 = mass strictly above K.
  std::vector<double> err(psi.size(), 0.0);
  for (int k = top - 1; k >= 0; --k) err[k] = err[k + 1] + mass[k + 1];
  for (std::size_t k = 1; k < psi.size(); ++k) psi[k] += psi[k - 1];

  std::map<int, double> delta_cache;
  auto delta_at = [&](int K) {
    auto it = delta_cache.find(K);
    if (it != delta_cache.end()) return it->second;
    Eigen::VectorXd rest = gamma.coeffs;
    for (Eigen::Index i = 0; i < d; ++i)
      if (gamma.basis.level(static_cast<int>(i)) <= K) rest(i) = 0.0;
    const double v = A(rest).norm();
    delta_cache[K] = v;
    return v;
  };

  std::vector<DecenteringRow> rows;
  for (double eps : eps_grid) {
    int K = top;
    for (int k = 0; k <= top; ++k) {
      if (std::sqrt(err[static_cast<std::size_t>(k)]) <= eps) {
        K = k;
        break;
      }
    }
    rows.push_back({eps, psi[static_cast<std::size_t>(K)], delta_at(K), K});
  }
  return rows;
}

double loglog_slope(const std::vector<DecenteringRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (!(r.psi > 0.0) || !(r.eps > 0.0)) continue;
    const double x = std::log(r.eps), y = std::log(r.psi);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) fail(ErrorCode::InvalidArgument, "slope fit needs at least two positive rows");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Rational to_rational(double x, long long max_denominator) {
  if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "cannot convert a non-finite value to a rational");
  const bool neg = x < 0;
  double v = std::abs(x);
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(v);
    const long long ai = static_cast<long long>(a);
    const long long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_denominator) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = v - a;
    if (frac < 1e-12 || std::abs(double(p1) / double(q1) - std::abs(x)) < 1e-14 * std::max(1.0, std::abs(x))) break;
    v = 1.0 / frac;
  }
  return Rational(neg ? -p1 : p1, q1);
}

double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << '/' << r.denominator();
  return os.str();
}

RateBundle rate_bundle(Example example, double alpha, double kappa_or_beta, int model, double beta, bool check) {
  RateBundle b;
  b.example = example;
  b.model = model;
  b.alpha = to_rational(alpha);
  b.kappa_or_beta = to_rational(kappa_or_beta);
  b.beta = to_rational(beta);
  const Rational one(1), two(2), four(4);
  auto violate = [](const std::string& what) { fail(ErrorCode::HypothesisViolated, what); };
  if (example == Example::Deconvolution) {
    const Rational kappa = b.kappa_or_beta;
    if (check) {
      if (model != 1 && model != 2) fail(ErrorCode::InvalidArgument, "deconvolution model must be 1 or 2");
      if (!(kappa > Rational(5, 2)))
        violate("kernel decay |g_k| <~ |k|^-kappa needs kappa > 5/2 (got kappa=" + to_string(kappa) + ")");
      if (!(b.alpha > b.beta + Rational(1, 2)))
        violate("prior regularity needs alpha > beta + 1/2 (got alpha=" + to_string(b.alpha) + ")");
      if (model == 2 && !(b.alpha > one))
        violate("model 2 needs alpha > 1 (got alpha=" + to_string(b.alpha) + ")");
    }
    const Rational s = b.alpha + kappa;
    b.eps_exponent = s / (two * s + one);
    b.tau_exponent = one / (four * s + two);
    b.eta = one - one / (b.beta + kappa);
  } else {
    const Rational bt = b.kappa_or_beta;
    if (check) {
      if (!(bt > one)) violate("attenuated X-ray needs beta > 1 (got beta=" + to_string(bt) + ")");
      if (!(b.alpha > bt + one))
        violate("attenuated X-ray needs alpha > beta + 1 (got alpha=" + to_string(b.alpha) + ")");
    }
    b.eps_exponent = b.alpha / (two + two * b.alpha);
    b.tau_exponent = one / (four * b.alpha + four);
    b.eta = (bt - one) / bt;
  }
  b.xi_exponent = b.eta * b.eps_exponent;
  if (check && !(b.eps_exponent > Rational(1, 4) && b.eps_exponent < Rational(1, 2)))
    violate("contraction exponent " + to_string(b.eps_exponent) + " outside (1/4, 1/2)");
  return b;
}

ScenarioResult scenario_check(const RateBundle& b, bool norm_constant, bool gamma_in_rkhs) {
  ScenarioResult res;
  const Rational one(1), two(2), four(4);
  const Rational e = b.eps_exponent;

  // n eps^2 xi^2 -> 0
  const Rational xi_exp = one - two * e - two * b.xi_exponent;
  res.notes.push_back("n eps^2 xi^2 ~ n^" + to_string(xi_exp));
  bool xi_ok = xi_exp < Rational(0);
  if (b.example == Example::Xray) {
    const double bt = to_double(b.kappa_or_beta);
    const double bound = 2.0 * bt / (3.0 * bt - 2.0);
    const bool closed = to_double(b.alpha) > bound;
    res.notes.push_back("closed form alpha > 2beta/(3beta-2) = " + std::to_string(bound) +
                        (closed ? " holds" : " fails"));
    xi_ok = xi_ok && closed;
  }

  // Cutoff-approximation rates, known for deconvolution with alpha > 1.
  bool rates_known = false, psi_delta_ok = false;
  if (b.example == Example::Deconvolution && b.alpha > one) {
    rates_known = true;
    const Rational s = b.alpha + b.kappa_or_beta;
    const Rational psi_exp = one - four * e + one / s;                  // n eps^4 psi(rho_n)
    const Rational delta_exp = one - two * e - (s - one) / (two * s);   // n eps^2 delta(rho_n)
    res.notes.push_back("rho_n = n^-" + to_string((b.alpha - one) / (two * s)));
    res.notes.push_back("n eps^4 psi ~ n^" + to_string(psi_exp));
    res.notes.push_back("n eps^2 delta ~ n^" + to_string(delta_exp));
    const double bound = -to_double(b.kappa_or_beta) + (3.0 + std::sqrt(17.0)) / 4.0;
    const bool closed = to_double(b.alpha) > bound;
    res.notes.push_back("closed form alpha > -kappa + (3+sqrt17)/4 = " + std::to_string(bound) +
                        (closed ? " holds" : " fails"));
    psi_delta_ok = psi_exp < Rational(0) && delta_exp < Rational(0) && closed;
  }

  if (norm_constant && gamma_in_rkhs) {
    res.scenario = "iv";
    res.pass = true;
  } else if (norm_constant && rates_known) {
    res.scenario = "iii";
    res.pass = psi_delta_ok;
  } else if (gamma_in_rkhs) {
    res.scenario = "ii";
    res.pass = xi_ok;
  } else if (rates_known) {
    res.scenario = "i";
    res.pass = xi_ok && psi_delta_ok;
  } else {
    res.scenario = "none";
    res.pass = false;
  }
  return res;
}

}  // namespace bvmlab
