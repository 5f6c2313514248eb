#include "bvmlab/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bvmlab/bvm_lab.hpp"
#include "bvmlab/config.hpp"
#include "bvmlab/kernels.hpp"
#include "bvmlab/tabular_io.hpp"

namespace bvmlab {

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

void report_error(const char* code, const std::string& field, const std::string& message) {
  std::cerr << "error: code=" << code << " field=" << (field.empty() ? "-" : field)
            << " message=" << one_line(message) << '\n';
}

std::string path_in(const Options& o, const std::string& name) {
  return (std::filesystem::path(o.out) / name).string();
}

ExperimentConfig load(const Options& o) {
  auto cfg = load_config(o.config);
  if (o.seed_set) cfg.seed = o.seed;
  return cfg;
}

std::string lfd_record(const ExperimentSetup& s) {
  std::ostringstream os;
  os << "model=" << s.family->name() << '\n'
     << "basis=" << to_string(s.f0.basis.tag) << '\n'
     << "truncation=" << s.f0.basis.truncation << '\n'
     << "info=" << format_double(s.lfd.info) << '\n'
     << "info_residual_form=" << format_double(s.lfd.info_residual) << '\n'
     << "residual=" << format_double(s.lfd.residual) << '\n'
     << "condition=" << format_double(s.lfd.condition) << '\n'
     << "gamma_norm=" << format_double(s.lfd.gamma.coeffs.norm()) << '\n';
  if (s.sweep_done)
    os << "sweep_info_2k=" << format_double(s.sweep.info_fine) << '\n'
       << "sweep_relative_change=" << format_double(s.sweep.relative_change) << '\n'
       << "sweep_flagged=" << (s.sweep.flagged ? 1 : 0) << '\n';
  return os.str();
}

std::string rates_record(const RateBundle& b, const ScenarioResult& sc) {
  std::ostringstream os;
  os << "example=" << (b.example == Example::Xray ? "xray" : "deconvolution") << '\n'
     << "alpha=" << to_string(b.alpha) << '\n'
     << "kappa_or_beta=" << to_string(b.kappa_or_beta) << '\n'
     << "eps_n=n^-" << to_string(b.eps_exponent) << '\n'
     << "tau_n=n^" << to_string(b.tau_exponent) << '\n'
     << "eta=" << to_string(b.eta) << '\n'
     << "xi_n=n^-" << to_string(b.xi_exponent) << '\n'
     << "scenario=" << sc.scenario << '\n'
     << "scenario_pass=" << (sc.pass ? 1 : 0) << '\n';
  for (const auto& note : sc.notes) os << "note=" << note << '\n';
  return os.str();
}

int run_simulate(const Options& o) {
  const auto cfg = load(o);
  const auto setup = prepare_experiment(cfg);
  const auto noise = standard_normal(setup.family->obs_dim(), cfg.seed);
  for (double n : cfg.n_list) {
    const auto obs = simulate_with_noise(cfg.theta0, setup.f0, *setup.family, n, noise);
    std::ostringstream os;
    os << "index,X,noise\n";
    for (Eigen::Index i = 0; i < obs.X.size(); ++i)
      os << i << ',' << format_double(obs.X(i)) << ',' << format_double(obs.noise(i)) << '\n';
    write_text_file(path_in(o, "observation_n" + format_double(n) + ".csv"), os.str());
  }
  write_coefficients(path_in(o, "truth.csv"), setup.f0);
  return 0;
}

int run_posterior(const Options& o) {
  const auto cfg = load(o);
  const auto res = run_experiment(cfg);
  for (std::size_t i = 0; i < res.reports.size(); ++i)
    write_text_file(path_in(o, "posterior_n" + format_double(res.reports[i].n) + ".csv"),
                    posterior_csv(res.posteriors[i]));
  return 0;
}

int run_info(const Options& o) {
  const auto setup = prepare_experiment(load(o));
  std::cout << "info=" << format_double(setup.lfd.info) << '\n';
  write_text_file(path_in(o, "info.txt"), lfd_record(setup));
  return 0;
}

int run_lfd(const Options& o) {
  const auto setup = prepare_experiment(load(o));
  write_text_file(path_in(o, "lfd.txt"), lfd_record(setup));
  write_coefficients(path_in(o, "gamma.csv"), setup.lfd.gamma);
  return 0;
}

int run_rates(const Options& o) {
  const auto cfg = load(o);
  const auto ex = example_kind(cfg);
  const auto bundle = rate_bundle(ex, cfg.alpha, cfg.kappa_or_beta, deconv_model(cfg), cfg.beta, true);
  const bool norm_constant = ex == Example::Deconvolution;
  const bool in_rkhs = !(ex == Example::Deconvolution && deconv_model(cfg) == 2);
  const auto sc = scenario_check(bundle, norm_constant, in_rkhs);
  const auto text = rates_record(bundle, sc);
  std::cout << text;
  write_text_file(path_in(o, "rates.txt"), text);
  if (!sc.pass) throw Error(ErrorCode::HypothesisViolated, "scenario (" + sc.scenario + ") rate conditions fail");
  return 0;
}

int run_bvm(const Options& o) {
  const auto res = run_experiment(load(o));
  write_text_file(path_in(o, "report.csv"), report_csv(res.reports));
  write_text_file(path_in(o, "lfd.txt"), lfd_record(res.setup));
  return 0;
}

int run_coverage(const Options& o) {
  const auto cfg = load(o);
  const auto res = coverage_study(cfg, cfg.replicates);
  std::ostringstream rows;
  rows << "replicate,z,z_recentered\n";
  for (std::size_t i = 0; i < res.z.size(); ++i)
    rows << i << ',' << format_double(res.z[i]) << ',' << format_double(res.z_recentered[i]) << '\n';
  write_text_file(path_in(o, "coverage_replicates.csv"), rows.str());
  std::ostringstream sum;
  sum << "n,replicates,coverage,z_variance,ks_statistic,ks_critical_99,band_lo,band_hi\n"
      << format_double(res.n) << ',' << res.replicates << ',' << format_double(res.coverage) << ','
      << format_double(res.z_variance) << ',' << format_double(res.ks_statistic) << ','
      << format_double(res.ks_critical_99) << ',' << format_double(cfg.coverage_lo) << ','
      << format_double(cfg.coverage_hi) << '\n';
  write_text_file(path_in(o, "coverage.csv"), sum.str());
  return 0;
}

int run_xray_forward(const Options& o) {
  const auto cfg = load(o);
  if (example_kind(cfg) != Example::Xray) throw ConfigError("experiment.example", "xray-forward needs example = xray");
  const auto setup = prepare_experiment(cfg);
  const auto& fam = dynamic_cast<const XrayFamily&>(*setup.family);
  const auto& geom = fam.geometry();
  const Eigen::MatrixXcd A = geom.matrix(cfg.theta0);
  Table mat;
  mat.fields = {"theta", "kmax", "nbeta", "nalpha"};
  mat.values = {format_double(cfg.theta0), std::to_string(geom.kmax()), std::to_string(cfg.nbeta),
                std::to_string(cfg.nalpha)};
  mat.columns = {"row", "col", "re", "im"};
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      mat.rows.push_back({double(i), double(j), A(i, j).real(), A(i, j).imag()});
  std::ostringstream ms;
  write_table(ms, mat);
  write_text_file(path_in(o, "xray_matrix.csv"), ms.str());

  const CVector values = to_complex(fam.matrix(cfg.theta0) * setup.f0.coeffs);
  Table sino;
  sino.fields = mat.fields;
  sino.values = mat.values;
  sino.columns = {"line", "beta", "alpha", "re", "im"};
  for (int l = 0; l < geom.grid().size(); ++l) {
    const double w = std::sqrt(geom.grid().weights[static_cast<std::size_t>(l)]);
    const auto& line = geom.grid().lines[static_cast<std::size_t>(l)];
    sino.rows.push_back({double(l), line.beta, line.alpha, values(l).real() / w, values(l).imag() / w});
  }
  std::ostringstream ss;
  write_table(ss, sino);
  write_text_file(path_in(o, "sinogram.csv"), ss.str());
  return 0;
}

}  // namespace

int dispatch(int argc, char** argv) {
  CLI::App app{"bvmlab: Bernstein-von Mises experiments for deconvolution and attenuated X-ray models"};
  app.require_subcommand(1);
  Options o;
  std::map<std::string, std::function<int(const Options&)>> handlers{
      {"simulate", run_simulate}, {"posterior", run_posterior}, {"info", run_info},
      {"lfd", run_lfd},           {"rates", run_rates},         {"bvm", run_bvm},
      {"coverage", run_coverage}, {"xray-forward", run_xray_forward}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, fn] : handlers) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", o.config, "experiment config file")->required();
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "seed override");
    sub->add_option("--threads", o.threads, "OpenMP threads (fallback: BVMLAB_THREADS)");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error("USAGE", "", e.what());
    return 1;
  }
  for (auto* sub : subs)
    if (sub->count("--seed")) o.seed_set = true;
  int threads = o.threads;
  if (threads <= 0)
    if (const char* env = std::getenv("BVMLAB_THREADS")) threads = std::atoi(env);
  kernels::set_threads(threads);
  try {
    std::filesystem::create_directories(o.out);
    for (auto* sub : subs)
      if (sub->parsed()) return handlers.at(sub->get_name())(o);
  } catch (const ConfigError& e) {
    report_error(to_string(e.code()), e.field(), e.what());
    return 2;
  } catch (const Error& e) {
    report_error(to_string(e.code()), "", e.what());
    return e.code() == ErrorCode::HypothesisViolated ? 3 : e.code() == ErrorCode::ConfigInvalid ? 2 : 1;
  } catch (const std::exception& e) {
    report_error("INTERNAL", "", e.what());
    return 1;
  }
  return 1;
}

}  // namespace bvmlab
