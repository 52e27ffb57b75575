#include "wsens/solver.hpp"

#include "setting.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace wsens {

namespace {

Eigen::VectorXd wealth_at(const Utility& u, double y, const Eigen::VectorXd& w, const Eigen::VectorXd& z) {
  Eigen::VectorXd x(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) x[i] = u.marginal_inverse(y * z[i] / w[i]);
  return x;
}

double budget_gap(const Utility& u, double y, const Eigen::VectorXd& w, const Eigen::VectorXd& z, double x0) {
  return stable_mean(z.cwiseProduct(wealth_at(u, y, w, z))) - x0;
}

Eigen::VectorXd utility_samples(const Utility& u, const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
  Eigen::VectorXd s(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) s[i] = w[i] * u.value(x[i]);
  return s;
}

}  // namespace

StaticSolution solve_static_budget(const Utility& utility, double x0, const Eigen::VectorXd& weight,
                                   const Eigen::VectorXd& density, const SolverOptions& options,
                                   std::uint64_t seed, std::string estimator) {
  if (weight.size() != density.size() || weight.size() == 0)
    throw ConfigError("static budget: weight and density sizes differ");
  if (!(x0 > 0.0)) throw ConfigError("static budget: initial wealth must be positive");
  if (!(weight.array() > 0.0).all() || !(density.array() > 0.0).all() || !weight.allFinite() ||
      !density.allFinite())
    throw NumericalError("static budget: weights and densities must be positive and finite");

  StaticSolution sol;
  if (!options.force_bisection && utility.is_power()) {
    const double q = utility.q();
    const Eigen::VectorXd g = (q * weight.array().log() + (1.0 - q) * density.array().log()).exp().matrix();
    const double m = stable_mean(g);
    sol.multiplier = std::pow(x0 / m, -1.0 / q);
    sol.wealth = (x0 / m) * (weight.array() / density.array()).pow(q).matrix();
    const double value = utility.p() * std::pow(x0, 1.0 / utility.p()) * std::pow(m, 1.0 / q);
    // Delta-method influence of value = c m^{1/q}.
    Eigen::VectorXd infl = (value + value / (q * m) * (g.array() - m)).matrix();
    sol.value = make_linearized(value, std::move(infl), seed, std::move(estimator));
    return sol;
  }
  if (!options.force_bisection && utility.kind() == Utility::Kind::log) {
    sol.multiplier = stable_mean(weight) / x0;
    sol.wealth = (weight.array() / (sol.multiplier * density.array())).matrix();
    sol.value = make_estimate(utility_samples(utility, weight, sol.wealth), seed, std::move(estimator));
    return sol;
  }

  // The budget map y -> mean(z I(y z / w)) is strictly decreasing.
  double lo = 1.0, hi = 1.0;
  if (options.bracket) {
    std::tie(lo, hi) = *options.bracket;
    if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("static budget: bracket must satisfy 0 < lo < hi");
    if (budget_gap(utility, lo, weight, density, x0) < 0.0 || budget_gap(utility, hi, weight, density, x0) > 0.0)
      throw NumericalError("static budget: bracket does not contain the multiplier");
  } else {
    int expand = 0;
    while (budget_gap(utility, lo, weight, density, x0) < 0.0) {
      lo /= 10.0;
      if (++expand > 300) throw NumericalError("static budget: multiplier not bracketed");
    }
    while (budget_gap(utility, hi, weight, density, x0) > 0.0) {
      hi *= 10.0;
      if (++expand > 300) throw NumericalError("static budget: multiplier not bracketed");
    }
  }
  int it = 0;
  while (it < options.max_iter && hi - lo > options.rel_tol * hi) {
    const double mid = std::sqrt(lo * hi);
    (budget_gap(utility, mid, weight, density, x0) > 0.0 ? lo : hi) = mid;
    ++it;
  }
  sol.iterations = it;
  sol.multiplier = 0.5 * (lo + hi);
  sol.wealth = wealth_at(utility, sol.multiplier, weight, density);
  sol.value = make_estimate(utility_samples(utility, weight, sol.wealth), seed, std::move(estimator));
  return sol;
}

PathFunctional state_price_density(const MarketModel& model, const PathEnsemble& ensemble) {
  if (model.factors != ensemble.dim()) throw ConfigError("state price density: dimension mismatch");
  return stochastic_exponential(VectorField::affine(market_price_of_risk(model), -1.0,
                                                    VectorField::zero(model.factors), 0.0),
                                ensemble);
}

OptimalWealth optimal_terminal_wealth(const MarketModel& model, const Utility& utility,
                                      const PathEnsemble& ensemble, const SolverOptions& options) {
  if (model.factors != ensemble.dim()) throw ConfigError("solver: market and ensemble dimensions differ");
  if (!model.complete() && !model.deterministic())
    throw ConfigError("solver: incomplete market with stochastic coefficients; supply X* externally");
  if (utility.kind() == Utility::Kind::custom && model.has_rate())
    throw ConfigError("solver: custom utilities are supported without an interest rate only");
  const VectorField lambda = market_price_of_risk(model);
  const auto cols = detail::evaluate_setting(lambda, lambda, VectorField::from_process(model.rate), ensemble);
  OptimalWealth out;
  out.density = cols.log_density_base.array().exp().matrix();
  const Eigen::VectorXd w = detail::discount_weight(utility, cols.rate_integral);
  StaticSolution sol =
      solve_static_budget(utility, model.initial_wealth, w, out.density, options, ensemble.seed(), "optimal_value");
  out.xstar = std::move(sol.wealth);
  out.multiplier = sol.multiplier;
  out.payoff = detail::terminal_payoff(utility, out.xstar, cols.rate_integral);
  out.value = std::move(sol.value);
  if (utility.kind() == Utility::Kind::log && model.has_rate())
    out.value = make_estimate(out.payoff, ensemble.seed(), "optimal_value");
  out.budget = make_estimate(out.density.cwiseProduct(out.xstar), ensemble.seed(), "budget");
  return out;
}

OptimalWealth external_wealth(const MarketModel& model, const Utility& utility, const PathEnsemble& ensemble,
                              Eigen::VectorXd xstar) {
  if (xstar.size() != static_cast<Eigen::Index>(ensemble.size()))
    throw ConfigError("external wealth: expected one value per path");
  if (!(xstar.array() > 0.0).all() || !xstar.allFinite())
    throw ConfigError("external wealth: values must be positive and finite");
  const VectorField lambda = market_price_of_risk(model);
  const auto cols = detail::evaluate_setting(lambda, lambda, VectorField::from_process(model.rate), ensemble);
  OptimalWealth out;
  out.density = cols.log_density_base.array().exp().matrix();
  out.xstar = std::move(xstar);
  out.payoff = detail::terminal_payoff(utility, out.xstar, cols.rate_integral);
  out.value = make_estimate(out.payoff, ensemble.seed(), "external_value");
  out.budget = make_estimate(out.density.cwiseProduct(out.xstar), ensemble.seed(), "budget");
  return out;
}

ClosedFormValue value_closed_form(const MarketModel& model, const Utility& utility, const PathEnsemble* ensemble) {
  const VectorField lambda = market_price_of_risk(model);
  const VectorField rate = VectorField::from_process(model.rate);
  const double x0 = model.initial_wealth;
  auto sq = [](const SmallVector& v) { return v.squaredNorm(); };
  auto first = [](const SmallVector& v) { return v(0); };
  ClosedFormValue out;
  std::ostringstream digest;
  digest << "x0=" << format_double(x0) << ";utility=" << utility.to_string();

  if (utility.kind() == Utility::Kind::log) {
    double energy = 0.0, rate_int = 0.0;
    if (model.deterministic()) {
      const double horizon = ensemble ? ensemble->grid().horizon() : 0.0;
      if (!ensemble) throw ConfigError("closed form: the horizon comes from the ensemble grid");
      energy = lambda.integrate(horizon, sq);
      rate_int = rate.integrate(horizon, first);
      out.formula = "log_exact";
    } else {
      if (!ensemble) throw ConfigError("closed form: adapted coefficients need an ensemble");
      const auto cols = detail::evaluate_setting(lambda, lambda, rate, *ensemble);
      energy = 2.0 * stable_mean(cols.half_energy);
      rate_int = stable_mean(cols.rate_integral);
      out.formula = "log_mc";
    }
    out.value = std::log(x0) + 0.5 * energy + rate_int;
    digest << ";energy=" << format_double(energy) << ";rate=" << format_double(rate_int);
    out.digest = digest.str();
    return out;
  }
  if (utility.is_power() && model.deterministic()) {
    if (!ensemble) throw ConfigError("closed form: the horizon comes from the ensemble grid");
    const double horizon = ensemble->grid().horizon();
    const double energy = lambda.integrate(horizon, sq);
    const double rate_int = rate.integrate(horizon, first);
    const double p = utility.p(), q = utility.q();
    out.value = p * std::pow(x0, 1.0 / p) * std::exp(0.5 * (q - 1.0) * energy + rate_int / p);
    out.formula = "power_deterministic";
    digest << ";energy=" << format_double(energy) << ";rate=" << format_double(rate_int);
    out.digest = digest.str();
    return out;
  }
  throw ConfigError("closed form: needs log utility, or power utility with deterministic coefficients");
}

void write_xstar_csv(std::ostream& os, const Eigen::VectorXd& xstar) {
  os << "path_index,xstar\n";
  for (Eigen::Index i = 0; i < xstar.size(); ++i) os << i << ',' << format_double(xstar[i]) << '\n';
}

Eigen::VectorXd read_xstar_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("path_index,xstar", 0) != 0)
    throw ConfigError("xstar csv: expected header 'path_index,xstar'");
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("xstar csv: bad row '" + line + "'");
    std::size_t index = 0;
    double x = 0.0;
    auto ri = std::from_chars(line.data(), line.data() + comma, index);
    std::string_view rest(line.data() + comma + 1, line.size() - comma - 1);
    if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);
    auto rx = std::from_chars(rest.data(), rest.data() + rest.size(), x);
    if (ri.ec != std::errc() || rx.ec != std::errc() || index != values.size())
      throw ConfigError("xstar csv: bad row '" + line + "'");
    values.push_back(x);
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace wsens
