#include "bvmlab/config.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace bvmlab {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"experiment", {"example", "alpha", "kappa_or_beta", "beta", "theta0", "f0", "n", "seed", "replicates",
                      "kmax", "zero_noise", "level"}},
      {"grid", {"theta_min", "theta_max", "nodes", "fine_nodes", "max_refinements"}},
      {"xray", {"nbeta", "nalpha", "chord_order", "chi_inner", "chi_outer"}},
      {"coverage", {"n", "lo", "hi"}},
  };
  return s;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& field) const {
    const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(field, '.'));
    if (!v) return std::nullopt;
    return *v;
  }

  double number(const std::string& field, double fallback) const {
    const auto s = raw(field);
    return s ? to_number(field, *s) : fallback;
  }

  int integer(const std::string& field, int fallback) const {
    const double v = number(field, fallback);
    if (v != std::floor(v) || std::abs(v) > 2e9) throw ConfigError(field, field + ": expected an integer");
    return static_cast<int>(v);
  }

  std::string text(const std::string& field, const std::string& fallback) const {
    const auto s = raw(field);
    return s ? *s : fallback;
  }

  std::vector<double> numbers(const std::string& field, std::vector<double> fallback) const {
    const auto s = raw(field);
    if (!s) return fallback;
    std::vector<double> out;
    std::stringstream ss(*s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_number(field, item));
    if (out.empty()) throw ConfigError(field, field + ": empty list");
    return out;
  }

  static double to_number(const std::string& field, const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (s.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(field, field + ": cannot parse '" + s + "' as a number");
    }
  }

 private:
  const pt::ptree& tree_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), "syntax error: " + e.message());
  }
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError(section, "unknown section or key '" + section + "'");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError(section + "." + key, "unknown key '" + section + "." + key + "'");
    }
  }
  const Reader r(tree);
  ExperimentConfig c;
  if (!r.raw("experiment.example")) throw ConfigError("experiment.example", "experiment.example is required");
  c.example = r.text("experiment.example", c.example);
  if (c.example != "deconv_model1" && c.example != "deconv_model2" && c.example != "xray")
    throw ConfigError("experiment.example", "experiment.example must be deconv_model1, deconv_model2 or xray");
  c.alpha = r.number("experiment.alpha", c.alpha);
  c.kappa_or_beta = r.number("experiment.kappa_or_beta", c.kappa_or_beta);
  c.beta = r.number("experiment.beta", c.beta);
  c.theta0 = r.number("experiment.theta0", c.theta0);
  c.f0 = r.text("experiment.f0", c.f0);
  c.n_list = r.numbers("experiment.n", c.n_list);
  for (double n : c.n_list)
    if (!(n > 0)) throw ConfigError("experiment.n", "experiment.n: noise levels must be positive");
  const double seed = r.number("experiment.seed", double(c.seed));
  if (seed < 0 || seed != std::floor(seed)) throw ConfigError("experiment.seed", "experiment.seed must be a non-negative integer");
  if (const auto s = r.raw("experiment.seed")) c.seed = std::stoull(*s);
  c.replicates = r.integer("experiment.replicates", c.replicates);
  c.kmax = r.integer("experiment.kmax", c.kmax);
  c.zero_noise = r.integer("experiment.zero_noise", 0) != 0;
  c.level = r.number("experiment.level", c.level);
  if (!(c.level > 0 && c.level < 1)) throw ConfigError("experiment.level", "experiment.level must lie in (0, 1)");

  c.grid.theta_min = r.number("grid.theta_min", c.grid.theta_min);
  c.grid.theta_max = r.number("grid.theta_max", c.grid.theta_max);
  c.grid.nodes = r.integer("grid.nodes", c.grid.nodes);
  c.grid.fine_nodes = r.integer("grid.fine_nodes", c.grid.fine_nodes);
  c.grid.max_refinements = r.integer("grid.max_refinements", c.grid.max_refinements);
  if (!(c.grid.theta_max > c.grid.theta_min)) throw ConfigError("grid.theta_max", "grid.theta_max must exceed grid.theta_min");
  if (c.grid.nodes < 3) throw ConfigError("grid.nodes", "grid.nodes must be >= 3");
  if (c.grid.fine_nodes < 3) throw ConfigError("grid.fine_nodes", "grid.fine_nodes must be >= 3");
  if (!(c.theta0 > c.grid.theta_min && c.theta0 < c.grid.theta_max))
    throw ConfigError("experiment.theta0", "experiment.theta0 must be interior to the theta grid");

  c.nbeta = r.integer("xray.nbeta", c.nbeta);
  c.nalpha = r.integer("xray.nalpha", c.nalpha);
  c.chord_order = r.integer("xray.chord_order", c.chord_order);
  c.chi_inner = r.number("xray.chi_inner", c.chi_inner);
  c.chi_outer = r.number("xray.chi_outer", c.chi_outer);
  if (c.nbeta < 1) throw ConfigError("xray.nbeta", "xray.nbeta must be positive");
  if (c.nalpha < 1) throw ConfigError("xray.nalpha", "xray.nalpha must be positive");
  if (c.chord_order < 1) throw ConfigError("xray.chord_order", "xray.chord_order must be positive");
  if (!(c.chi_outer >= c.chi_inner && c.chi_outer < 1.0))
    throw ConfigError("xray.chi_outer", "xray.chi_outer must satisfy chi_inner <= chi_outer < 1");

  c.coverage_n = r.number("coverage.n", c.coverage_n);
  c.coverage_lo = r.number("coverage.lo", c.coverage_lo);
  c.coverage_hi = r.number("coverage.hi", c.coverage_hi);
  if (!(c.coverage_lo <= c.coverage_hi)) throw ConfigError("coverage.hi", "coverage.hi must be >= coverage.lo");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("path", "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace bvmlab
