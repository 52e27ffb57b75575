#include "wsens/valuation.hpp"

#include "setting.hpp"

#include <cmath>
#include <ostream>

namespace wsens {

CoefficientProcess PerturbationSpec::drift_or_zero(const MarketModel& m) const {
  return drift ? *drift : CoefficientProcess::zero(m.assets, 1);
}
CoefficientProcess PerturbationSpec::volatility_or_zero(const MarketModel& m) const {
  return volatility ? *volatility : CoefficientProcess::zero(m.assets, m.factors);
}
CoefficientProcess PerturbationSpec::rate_or_zero() const {
  return rate ? *rate : CoefficientProcess::zero(1, 1);
}

namespace {

void require_solvable(const MarketModel& model, const Utility& utility, bool lambda_deterministic) {
  if (utility.kind() == Utility::Kind::log) return;
  if (!model.complete() && !(model.deterministic() && lambda_deterministic))
    throw ConfigError("valuation: incomplete market with stochastic coefficients is outside the solver's scope");
  if (utility.kind() == Utility::Kind::custom && model.has_rate())
    throw ConfigError("valuation: custom utilities are supported without an interest rate only");
}

WeakValue weak_core(const MarketModel& model, const Utility& utility, const detail::SettingColumns& c,
                    std::uint64_t seed) {
  const Eigen::VectorXd g = c.log_weight.array().exp().matrix();
  WeakValue out;
  out.weight_mean = make_estimate(g, seed, "weight_mean");
  if (utility.kind() == Utility::Kind::log) {
    // Under P^tau the log-optimal value is log x0 + E^tau[1/2 int |lambda|^2 + int r].
    const Eigen::VectorXd s =
        (std::log(model.initial_wealth) + g.array() * (c.half_energy + c.rate_integral).array()).matrix();
    out.value = make_estimate(s, seed, "weak_value");
    return out;
  }
  const Eigen::VectorXd w = g.cwiseProduct(detail::discount_weight(utility, c.rate_integral));
  const Eigen::VectorXd z = (c.log_weight + c.log_density_shifted).array().exp().matrix();
  out.value = solve_static_budget(utility, model.initial_wealth, w, z, {}, seed, "weak_value").value;
  return out;
}

ValueEstimate strong_core(const MarketModel& model, const Utility& utility, const detail::SettingColumns& c,
                          std::uint64_t seed) {
  if (utility.kind() == Utility::Kind::log) {
    const Eigen::VectorXd s = (std::log(model.initial_wealth) + (c.half_energy + c.rate_integral).array()).matrix();
    return make_estimate(s, seed, "strong_value");
  }
  const Eigen::VectorXd w = detail::discount_weight(utility, c.rate_integral);
  const Eigen::VectorXd z = c.log_density_new.array().exp().matrix();
  return solve_static_budget(utility, model.initial_wealth, w, z, {}, seed, "strong_value").value;
}

struct PerturbedFields {
  VectorField lambda_base;
  VectorField lambda_new;
  VectorField rate;
  std::optional<VectorField> h1;
};

PerturbedFields perturbed_fields(const MarketModel& model, const PerturbationSpec& pert) {
  const auto dmu = pert.drift_or_zero(model);
  const auto dsigma = pert.volatility_or_zero(model);
  const auto dr = pert.rate_or_zero();
  PerturbedFields f{market_price_of_risk(model), perturbed_price_of_risk(model, dmu, dsigma, dr, pert.tau),
                    perturbed_rate(model, dr, pert.tau), std::nullopt};
  if (pert.tau != 0.0 && !dsigma.is_zero())
    f.h1 = h1_field(model.volatility, dsigma, pert.tau, kDefaultRankTol, model.condition_cap);
  return f;
}

void require_dims(const MarketModel& model, const PathEnsemble& ensemble) {
  if (model.factors != ensemble.dim()) throw ConfigError("valuation: market and ensemble dimensions differ");
}

}  // namespace

WeakValue weak_value(const MarketModel& model, const Utility& utility, const PerturbationSpec& pert,
                     const PathEnsemble& ensemble) {
  require_dims(model, ensemble);
  const auto f = perturbed_fields(model, pert);
  require_solvable(model, utility, f.lambda_new.deterministic());
  const auto cols = detail::evaluate_setting(f.lambda_base, f.lambda_new, f.rate, ensemble, f.h1 ? &*f.h1 : nullptr);
  return weak_core(model, utility, cols, ensemble.seed());
}

ValueEstimate strong_value(const MarketModel& model, const Utility& utility, const PerturbationSpec& pert,
                           const PathEnsemble& ensemble) {
  require_dims(model, ensemble);
  const auto f = perturbed_fields(model, pert);
  require_solvable(model, utility, f.lambda_new.deterministic());
  const auto cols = detail::evaluate_setting(f.lambda_base, f.lambda_new, f.rate, ensemble);
  return strong_core(model, utility, cols, ensemble.seed());
}

WeakValue weak_value_lambda(const MarketModel& model, const Utility& utility, const VectorField& lambda,
                            const PathEnsemble& ensemble) {
  require_dims(model, ensemble);
  require_solvable(model, utility, lambda.deterministic());
  const auto cols = detail::evaluate_setting(market_price_of_risk(model), lambda,
                                             VectorField::from_process(model.rate), ensemble);
  return weak_core(model, utility, cols, ensemble.seed());
}

ValueEstimate strong_value_lambda(const MarketModel& model, const Utility& utility, const VectorField& lambda,
                                  const PathEnsemble& ensemble) {
  require_dims(model, ensemble);
  require_solvable(model, utility, lambda.deterministic());
  const auto cols = detail::evaluate_setting(market_price_of_risk(model), lambda,
                                             VectorField::from_process(model.rate), ensemble);
  return strong_core(model, utility, cols, ensemble.seed());
}

std::vector<SurfaceRow> value_surface(const MarketModel& model, const Utility& utility,
                                      const PerturbationSpec& pert, const std::vector<double>& tau_grid,
                                      const PathEnsemble& ensemble) {
  require_dims(model, ensemble);
  std::vector<SurfaceRow> rows;
  for (double tau : tau_grid) {
    PerturbationSpec at = pert;
    at.tau = tau;
    const auto f = perturbed_fields(model, at);
    require_solvable(model, utility, f.lambda_new.deterministic());
    const auto cols =
        detail::evaluate_setting(f.lambda_base, f.lambda_new, f.rate, ensemble, f.h1 ? &*f.h1 : nullptr);
    SurfaceRow row;
    row.tau = tau;
    WeakValue w = weak_core(model, utility, cols, ensemble.seed());
    row.weak = std::move(w.value);
    row.weight_mean = w.weight_mean.mean;
    row.strong = strong_core(model, utility, cols, ensemble.seed());
    row.gap_std_error = paired_std_error(row.weak, row.strong);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_surface_csv(std::ostream& os, const std::vector<SurfaceRow>& rows) {
  os << "tau,u_weak,se_weak,u_strong,se_strong,weight_mean,seed\n";
  for (const auto& r : rows)
    os << format_double(r.tau) << ',' << format_double(r.weak.mean) << ',' << format_double(r.weak.std_error) << ','
       << format_double(r.strong.mean) << ',' << format_double(r.strong.std_error) << ','
       << format_double(r.weight_mean) << ',' << r.weak.seed << '\n';
}

}  // namespace wsens
