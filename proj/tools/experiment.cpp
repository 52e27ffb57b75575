#include "experiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace wsens::cli {

namespace pt = boost::property_tree;

namespace {

template <class T>
T parse_number(const std::string& raw, const std::string& key) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("config: '" + key + "' expects a number, got '" + raw + "'");
  return v;
}

std::vector<double> parse_list(std::string s, const std::string& key) {
  if (!s.empty() && s.front() == '[') s.erase(0, 1);
  if (!s.empty() && s.back() == ']') s.pop_back();
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (item.find_first_not_of(" \t") != std::string::npos) out.push_back(parse_number<double>(item, key));
  return out;
}

std::string list_string(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

const std::set<std::string> kKeys[] = {
    {"d", "n", "mu", "sigma", "r", "x0", "condition_cap"},
    {"dmu", "dsigma", "dr", "kernel_direction", "tau", "tau_grid", "eps"},
    {"paths", "steps", "horizon", "seed"},
    {"utility"},
    {},
    {"cloud", "direction", "delta", "tie_tol"},
    {"directory", "formats"},
};
const char* const kSections[] = {"market", "perturbation", "mc", "utility", "norms", "danskin", "output"};

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [name, section] : tree) {
    const auto* it = std::find(std::begin(kSections), std::end(kSections), name);
    if (it == std::end(kSections)) throw ConfigError("config: unknown section [" + name + "]");
    const auto& keys = kKeys[it - std::begin(kSections)];
    for (const auto& [key, value] : section) {
      (void)value;
      if (name == "norms" ? key.rfind("nu", 0) != 0 : !keys.count(key))
        throw ConfigError("config: unknown key '" + key + "' in [" + name + "]");
    }
  }
  ExperimentConfig c;
  auto get = [&](const std::string& path) { return tree.get_optional<std::string>(pt::ptree::path_type(path, '/')); };
  if (auto v = get("market/d")) c.market.d = parse_number<int>(*v, "d");
  if (auto v = get("market/n")) c.market.n = parse_number<int>(*v, "n");
  if (auto v = get("market/mu")) c.market.mu = *v;
  if (auto v = get("market/sigma")) c.market.sigma = *v;
  if (auto v = get("market/r")) c.market.r = *v;
  if (auto v = get("market/x0")) c.market.x0 = parse_number<double>(*v, "x0");
  if (auto v = get("market/condition_cap")) c.market.condition_cap = parse_number<double>(*v, "condition_cap");
  if (auto v = get("perturbation/dmu")) c.perturbation.dmu = *v;
  if (auto v = get("perturbation/dsigma")) c.perturbation.dsigma = *v;
  if (auto v = get("perturbation/dr")) c.perturbation.dr = *v;
  if (auto v = get("perturbation/kernel_direction")) c.perturbation.kernel_direction = *v;
  if (auto v = get("perturbation/tau")) c.perturbation.tau = parse_number<double>(*v, "tau");
  if (auto v = get("perturbation/tau_grid")) c.perturbation.tau_grid = parse_list(*v, "tau_grid");
  if (auto v = get("perturbation/eps")) c.perturbation.eps = parse_list(*v, "eps");
  if (auto v = get("mc/paths")) c.mc.paths = parse_number<std::size_t>(*v, "paths");
  if (auto v = get("mc/steps")) c.mc.steps = parse_number<int>(*v, "steps");
  if (auto v = get("mc/horizon")) c.mc.horizon = parse_number<double>(*v, "horizon");
  if (auto v = get("mc/seed")) c.mc.seed = parse_number<std::uint64_t>(*v, "seed");
  if (auto v = get("utility/utility")) c.utility = *v;
  if (auto norms = tree.get_child_optional("norms"))
    for (const auto& [key, value] : *norms) c.norms.family.push_back(value.data());
  if (auto v = get("danskin/cloud")) c.danskin.cloud = *v;
  if (auto v = get("danskin/direction")) c.danskin.direction = parse_list(*v, "direction");
  if (auto v = get("danskin/delta")) c.danskin.delta = parse_list(*v, "delta");
  if (auto v = get("danskin/tie_tol")) c.danskin.tie_tol = parse_number<double>(*v, "tie_tol");
  if (auto v = get("output/directory")) c.output.directory = *v;
  if (auto v = get("output/formats")) c.output.formats = *v;
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse(in);
}

std::string ExperimentConfig::to_ini() const {
  std::ostringstream os;
  os << "[market]\n"
     << "d = " << market.d << "\nn = " << market.n << "\nmu = " << market.mu << "\nsigma = " << market.sigma
     << "\nr = " << market.r << "\nx0 = " << format_double(market.x0)
     << "\ncondition_cap = " << format_double(market.condition_cap) << "\n\n[perturbation]\n";
  if (!perturbation.dmu.empty()) os << "dmu = " << perturbation.dmu << '\n';
  if (!perturbation.dsigma.empty()) os << "dsigma = " << perturbation.dsigma << '\n';
  if (!perturbation.dr.empty()) os << "dr = " << perturbation.dr << '\n';
  if (!perturbation.kernel_direction.empty()) os << "kernel_direction = " << perturbation.kernel_direction << '\n';
  os << "tau = " << format_double(perturbation.tau) << '\n';
  if (!perturbation.tau_grid.empty()) os << "tau_grid = " << list_string(perturbation.tau_grid) << '\n';
  os << "eps = " << list_string(perturbation.eps) << "\n\n[mc]\n"
     << "paths = " << mc.paths << "\nsteps = " << mc.steps << "\nhorizon = " << format_double(mc.horizon) << '\n';
  if (mc.seed) os << "seed = " << *mc.seed << '\n';
  os << "\n[utility]\nutility = " << utility << "\n\n[norms]\n";
  for (std::size_t i = 0; i < norms.family.size(); ++i) os << "nu" << i + 1 << " = " << norms.family[i] << '\n';
  os << "\n[danskin]\n";
  if (!danskin.cloud.empty()) os << "cloud = " << danskin.cloud << '\n';
  if (!danskin.direction.empty()) os << "direction = " << list_string(danskin.direction) << '\n';
  if (!danskin.delta.empty()) os << "delta = " << list_string(danskin.delta) << '\n';
  os << "tie_tol = " << format_double(danskin.tie_tol) << "\n\n[output]\n"
     << "directory = " << output.directory << "\nformats = " << output.formats << '\n';
  return os.str();
}

void ExperimentConfig::validate() const {
  (void)market_model();
  (void)utility_spec();
  (void)perturbation_spec();
  if (!perturbation.kernel_direction.empty())
    (void)CoefficientProcess::parse(perturbation.kernel_direction, market.d, market.d);
  if (mc.paths < 1 || mc.steps < 1 || !(mc.horizon > 0.0))
    throw ConfigError("config: [mc] needs paths >= 1, steps >= 1 and horizon > 0");
  if (!mc.seed) throw ConfigError("config: [mc] seed is mandatory");
  if (output.formats != "csv") throw ConfigError("config: only the csv output format is supported");
  for (const auto& nu : norms.family) (void)CoefficientProcess::parse(nu, market.n, 1);
}

MarketModel ExperimentConfig::market_model() const {
  const int d = market.d, n = market.n;
  if (d < 1 || n < d || n > kMaxDim) throw ConfigError("config: need 1 <= d <= n <= " + std::to_string(kMaxDim));
  MarketModel m(d, n, CoefficientProcess::parse(market.mu, d, 1), CoefficientProcess::parse(market.sigma, d, n),
                CoefficientProcess::parse(market.r, 1, 1), market.x0);
  m.condition_cap = market.condition_cap;
  m.validate();
  return m;
}

Utility ExperimentConfig::utility_spec() const { return Utility::parse(utility); }

PerturbationSpec ExperimentConfig::perturbation_spec() const {
  PerturbationSpec p;
  const int d = market.d, n = market.n;
  if (!perturbation.dmu.empty()) p.drift = CoefficientProcess::parse(perturbation.dmu, d, 1);
  if (!perturbation.dsigma.empty()) p.volatility = CoefficientProcess::parse(perturbation.dsigma, d, n);
  if (!perturbation.dr.empty()) p.rate = CoefficientProcess::parse(perturbation.dr, 1, 1);
  if (p.drift) p.drift->require_shape(d, 1, n, "dmu");
  if (p.volatility) p.volatility->require_shape(d, n, n, "dsigma");
  if (p.rate) p.rate->require_shape(1, 1, n, "dr");
  p.tau = perturbation.tau;
  return p;
}

std::uint64_t ExperimentConfig::seed() const {
  if (!mc.seed) throw ConfigError("config: [mc] seed is mandatory");
  return *mc.seed;
}

PathEnsemble ExperimentConfig::ensemble() const {
  return PathEnsemble(TimeGrid(mc.horizon, mc.steps), market.n, mc.paths, seed());
}

namespace {

std::string fmt(double x) { return format_double(x); }

std::ofstream open_csv(const ExperimentConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.output.directory);
  const auto path = std::filesystem::path(c.output.directory) / (name + ".csv");
  std::ofstream os(path);
  if (!os) throw ConfigError("output: cannot write '" + path.string() + "'");
  return os;
}

void header(std::ostream& out, const std::string& command, const ExperimentConfig& c) {
  out << command << ": seed " << c.seed() << ", paths " << c.mc.paths << ", steps " << c.mc.steps << ", horizon "
      << fmt(c.mc.horizon) << ", stream scheme " << kStreamScheme << "\n";
}

int cmd_value(const ExperimentConfig& c, std::ostream& out) {
  const auto model = c.market_model();
  const auto utility = c.utility_spec();
  const auto pert = c.perturbation_spec();
  const auto grid = c.perturbation.tau_grid.empty() ? std::vector<double>{c.perturbation.tau} : c.perturbation.tau_grid;
  const auto rows = value_surface(model, utility, pert, grid, c.ensemble());
  auto os = open_csv(c, "value");
  write_surface_csv(os, rows);
  header(out, "value", c);
  for (const auto& r : rows)
    out << "  tau " << fmt(r.tau) << ": weak " << fmt(r.weak.mean) << " (se " << fmt(r.weak.std_error) << "), strong "
        << fmt(r.strong.mean) << " (se " << fmt(r.strong.std_error) << "), gap se " << fmt(r.gap_std_error)
        << ", weight mean " << fmt(r.weight_mean) << "\n";
  return kOk;
}

int cmd_sens(const ExperimentConfig& c, std::ostream& out) {
  const auto model = c.market_model();
  const auto utility = c.utility_spec();
  const auto full = c.perturbation_spec();
  const auto ensemble = c.ensemble();
  std::vector<SensitivityReport> weak, gap;
  const char* names[] = {"mu", "sigma", "rate"};
  for (int i = 0; i < 3; ++i) {
    PerturbationSpec one;
    if (i == 0) one.drift = full.drift;
    if (i == 1) one.volatility = full.volatility;
    if (i == 2) one.rate = full.rate;
    weak.push_back(weak_report(model, utility, one, ensemble, names[i], c.perturbation.eps));
    gap.push_back(gap_report(model, utility, one, ensemble, std::string("gap_") + names[i], c.perturbation.eps));
  }
  auto os = open_csv(c, "sens");
  write_report_csv(os, weak);
  auto gs = open_csv(c, "sens_gap");
  write_report_csv(gs, gap);
  header(out, "sens", c);
  bool ok = true;
  for (const auto& r : weak) {
    out << "  " << r.direction << ": formula " << fmt(r.formula.mean) << " (se " << fmt(r.formula.std_error)
        << "), weak fd " << fmt(r.fd.estimate.mean) << ", gap " << fmt(r.gap) << ", tolerance " << fmt(r.tolerance)
        << " -> " << (r.pass ? "pass" : "FAIL") << "\n";
    ok = ok && r.pass;
  }
  for (const auto& r : gap)
    out << "  " << r.direction << ": weak formula minus strong fd " << fmt(r.gap) << " (tolerance "
        << fmt(r.tolerance) << ")\n";
  return ok ? kOk : kFailure;
}

int cmd_example1(const ExperimentConfig& c, std::ostream& out) {
  const auto r = example1_report(c.mc.horizon, c.mc.paths, c.mc.steps, c.seed());
  const double tol_strong = std::max(0.01 * r.horizon, 4.0 * r.strong.std_error);
  const double tol_weak = std::max(0.015 * r.horizon, 4.0 * r.weak.std_error);
  const bool strong_ok = std::abs(r.strong.mean - r.strong_target) <= tol_strong;
  const bool weak_ok = std::abs(r.weak.mean - r.weak_target) <= tol_weak;
  const bool gap_ok = r.gap.mean < 0.0 && std::abs(r.gap.mean) > 5.0 * r.gap.std_error;
  auto os = open_csv(c, "example1");
  os << "quantity,estimate,std_error,target,tolerance,verdict,seed\n";
  auto row = [&](const char* name, const ValueEstimate& e, double target, double tol, bool ok) {
    os << name << ',' << fmt(e.mean) << ',' << fmt(e.std_error) << ',' << fmt(target) << ',' << fmt(tol) << ','
       << (ok ? "pass" : "fail") << ',' << e.seed << '\n';
  };
  row("strong", r.strong, r.strong_target, tol_strong, strong_ok);
  row("weak", r.weak, r.weak_target, tol_weak, weak_ok);
  row("weak_minus_strong", r.gap, r.gap_target, 5.0 * r.gap.std_error, gap_ok);
  header(out, "example1", c);
  out << "  strong " << fmt(r.strong.mean) << " (target " << fmt(r.strong_target) << ", tolerance " << fmt(tol_strong)
      << ")\n  weak " << fmt(r.weak.mean) << " (target " << fmt(r.weak_target) << ", tolerance " << fmt(tol_weak)
      << ")\n  weak - strong " << fmt(r.gap.mean) << " (se " << fmt(r.gap.std_error) << ", must be negative beyond 5 se)\n";
  return strong_ok && weak_ok && gap_ok ? kOk : kFailure;
}

int cmd_example2(const ExperimentConfig& c, std::ostream& out) {
  const PathEnsemble ensemble(TimeGrid(c.mc.horizon, c.mc.steps), 1, c.mc.paths, c.seed());
  const VectorField delta = VectorField::constant(SmallVector::Constant(1, -1.0));
  const VectorField deterministic = VectorField::constant(SmallVector::Constant(1, 1.0));
  // lambda = 1{int delta dW > 0} = 1{W < 0} for delta = -1.
  SmallMatrix lo = SmallMatrix::Zero(1, 1), hi = SmallMatrix::Ones(1, 1);
  const VectorField indicator = VectorField::from_process(CoefficientProcess::indicator(0, 0.0, lo, hi));
  const auto det = example2_discrepancy(deterministic, delta, ensemble);
  const auto ind = example2_discrepancy(indicator, delta, ensemble);
  const bool det_ok = std::abs(det.mean) <= 3.0 * det.std_error;
  const bool ind_ok = ind.mean > 3.0 * ind.std_error;
  auto os = open_csv(c, "example2");
  os << "case,estimate,std_error,verdict,seed\n";
  os << "deterministic," << fmt(det.mean) << ',' << fmt(det.std_error) << ',' << (det_ok ? "pass" : "fail") << ','
     << det.seed << '\n';
  os << "indicator," << fmt(ind.mean) << ',' << fmt(ind.std_error) << ',' << (ind_ok ? "pass" : "fail") << ','
     << ind.seed << '\n';
  header(out, "example2", c);
  out << "  deterministic lambda: " << fmt(det.mean) << " (se " << fmt(det.std_error) << ", expected 0)\n"
      << "  indicator lambda: " << fmt(ind.mean) << " (se " << fmt(ind.std_error) << ", expected > 0)\n";
  return det_ok && ind_ok ? kOk : kFailure;
}

int cmd_h1check(const ExperimentConfig& c, std::ostream& out) {
  const auto model = c.market_model();
  const auto ensemble = c.ensemble();
  H1Report report;
  double safe_bound = std::numeric_limits<double>::infinity();
  bool warning = false;
  if (!c.perturbation.kernel_direction.empty()) {
    const auto a = CoefficientProcess::parse(c.perturbation.kernel_direction, model.assets, model.assets);
    const auto kp = kernel_preserving_perturbation(model.volatility, a, c.perturbation.tau);
    safe_bound = kp.safe_bound;
    warning = kp.warning;
    report = check_h1(model.volatility, kp.volatility, ensemble, kDefaultRankTol, model.condition_cap);
  } else {
    const auto pert = c.perturbation_spec();
    report = check_h1(model.volatility, pert.volatility_or_zero(model), pert.tau, ensemble, kDefaultRankTol,
                      model.condition_cap);
  }
  auto os = open_csv(c, "h1check");
  auto index = [](std::size_t i) { return i == NumericalError::npos ? std::string("-1") : std::to_string(i); };
  os << "full_rank,kernel_equal,inv_bound,worst_path,worst_node,safe_bound,warning,seed\n"
     << report.full_rank << ',' << report.kernel_equal << ',' << fmt(report.inv_bound) << ','
     << index(report.worst_path) << ',' << index(report.worst_node) << ',' << fmt(safe_bound) << ',' << warning << ','
     << c.seed() << '\n';
  header(out, "h1check", c);
  out << "  full rank " << (report.full_rank ? "yes" : "no") << ", kernel preserved "
      << (report.kernel_equal ? "yes" : "no") << ", max ||(sigma sigma^T)^-1|| " << fmt(report.inv_bound) << "\n";
  if (!report.passed())
    out << "  first violation at path " << index(report.worst_path) << ", node " << index(report.worst_node)
        << " (t = " << fmt(report.worst_time) << ")\n";
  if (warning) out << "  warning: |tau| is at or beyond the safe bound " << fmt(safe_bound) << "\n";
  return report.passed() ? kOk : kFailure;
}

int cmd_norms(const ExperimentConfig& c, std::ostream& out) {
  const auto model = c.market_model();
  const auto utility = c.utility_spec();
  if (!utility.is_power()) throw ConfigError("norms: needs a power utility");
  const auto ensemble = c.ensemble();
  std::vector<CoefficientProcess> family;
  for (const auto& nu : c.norms.family) family.push_back(CoefficientProcess::parse(nu, model.factors, 1));
  const auto densities = kernel_densities(model, family, ensemble);
  const auto opt = optimal_terminal_wealth(model, utility, ensemble);
  Eigen::VectorXd u(opt.xstar.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = utility.value(opt.xstar[i]);
  const auto j = j_functional(u, utility, densities);
  // U^{-1}(u) = (u / p)^p, so J is p-homogeneous in the scale.
  const double jp = j.mean, p = utility.p();
  auto j_scaled = [jp, p](double s) { return std::pow(std::abs(s), p) * jp; };
  const double amemiya = amemiya_norm(j_scaled);
  const double luxemburg = luxemburg_norm(j_scaled);
  const double nj = norm_j(u, utility.p(), densities);
  const double ni = norm_i(opt.density, utility.q(), densities);
  const auto holder = holder_check(opt.density, u, utility.p(), densities);
  auto os = open_csv(c, "norms");
  os << "quantity,value,std_error,seed\n";
  os << "j_functional," << fmt(j.mean) << ',' << fmt(j.std_error) << ',' << c.seed() << '\n';
  os << "x0," << fmt(model.initial_wealth) << ",0," << c.seed() << '\n';
  os << "amemiya_j," << fmt(amemiya) << ",," << c.seed() << '\n';
  os << "luxemburg_j," << fmt(luxemburg) << ",," << c.seed() << '\n';
  os << "norm_j," << fmt(nj) << ",," << c.seed() << '\n';
  os << "norm_i_density," << fmt(ni) << ",," << c.seed() << '\n';
  os << "holder_ratio," << fmt(holder.ratio) << ",," << c.seed() << '\n';
  header(out, "norms", c);
  out << "  J(U(X*)) " << fmt(j.mean) << " (se " << fmt(j.std_error) << ", budget " << fmt(model.initial_wealth)
      << ")\n  Amemiya norm " << fmt(amemiya) << " <= 1 + x0 + 3 se = " << fmt(1.0 + model.initial_wealth + 3.0 * j.std_error)
      << "\n  Luxemburg norm " << fmt(luxemburg) << ", constant-free norm_J " << fmt(nj)
      << "\n  Hoelder ratio " << fmt(holder.ratio) << (holder.holds ? " (holds)" : " (VIOLATED)") << "\n";
  return holder.holds && amemiya <= 1.0 + model.initial_wealth + 3.0 * j.std_error ? kOk : kFailure;
}

PointCloud read_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("danskin: cannot open cloud '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    rows.push_back(parse_list(line, "cloud row"));
    if (rows.back().size() != rows.front().size()) throw ConfigError("danskin: ragged cloud");
  }
  if (rows.empty() || rows.front().empty()) throw ConfigError("danskin: empty cloud");
  PointCloud cloud(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      cloud(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return cloud;
}

int cmd_danskin(const ExperimentConfig& c, std::ostream& out) {
  if (c.danskin.cloud.empty()) throw ConfigError("danskin: [danskin] cloud is required");
  const PointCloud cloud = read_cloud(c.danskin.cloud);
  const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(c.danskin.direction.data(),
                                                              static_cast<Eigen::Index>(c.danskin.direction.size()));
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(d.size());
  if (!c.danskin.delta.empty())
    delta = Eigen::Map<const Eigen::VectorXd>(c.danskin.delta.data(), static_cast<Eigen::Index>(c.danskin.delta.size()));
  const auto s = support_value(d, cloud, c.danskin.tie_tol);
  const double deriv = directional_derivative(d, delta, cloud, c.danskin.tie_tol);
  std::string argmax;
  for (std::size_t i = 0; i < s.argmax.size(); ++i) argmax += (i ? ";" : "") + std::to_string(s.argmax[i]);
  auto os = open_csv(c, "danskin");
  os << "value,argmax,derivative,radius\n" << fmt(s.value) << ',' << argmax << ',' << fmt(deriv) << ','
     << fmt(s.radius) << '\n';
  out << "danskin: v(d) = " << fmt(s.value) << ", argmax rows {" << argmax << "}, derivative along delta "
      << fmt(deriv) << "\n";
  return kOk;
}

int cmd_secondorder(const ExperimentConfig& c, std::ostream& out) {
  const auto model = c.market_model();
  const auto utility = c.utility_spec();
  const auto pert = c.perturbation_spec();
  const VectorField dlam = dlambda_direction(model, pert.drift_or_zero(model), pert.volatility_or_zero(model),
                                             pert.rate_or_zero());
  const auto r = second_order_check(model, utility, dlam, c.perturbation.eps, c.ensemble());
  auto os = open_csv(c, "secondorder");
  os << "eps,residual,negative_part\n";
  for (std::size_t i = 0; i < r.eps.size(); ++i)
    os << fmt(r.eps[i]) << ',' << fmt(r.residual[i]) << ',' << fmt(r.negative_part[i]) << '\n';
  header(out, "secondorder", c);
  out << "  derivative " << fmt(r.derivative) << ", fitted C " << fmt(r.fitted_constant) << ", slope of negative part "
      << (r.fitted_points >= 2 ? fmt(r.slope) : std::string("n/a (fewer than two negative residuals)")) << " -> "
      << (r.pass ? "pass" : "FAIL") << "\n";
  return r.pass ? kOk : kFailure;
}

}  // namespace

int run(const std::string& command, const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (command != "danskin") config.validate();
    if (command == "value") return cmd_value(config, out);
    if (command == "sens") return cmd_sens(config, out);
    if (command == "example1") return cmd_example1(config, out);
    if (command == "example2") return cmd_example2(config, out);
    if (command == "h1check") return cmd_h1check(config, out);
    if (command == "norms") return cmd_norms(config, out);
    if (command == "danskin") return cmd_danskin(config, out);
    if (command == "secondorder") return cmd_secondorder(config, out);
    err << "unknown command '" << command << "'\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigInvalid;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace wsens::cli
