#include "wsens/sensitivity.hpp"

#include "setting.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

namespace wsens {

namespace {

// (sigma sigma^T)^{-1} rhs, or nullopt beyond the condition cap.
std::optional<SmallVector> gram_solve(const SmallMatrix& sigma, const SmallVector& rhs, double cap) {
  Eigen::JacobiSVD<SmallMatrix> svd(sigma);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0) || (s(0) / smin) * (s(0) / smin) > cap) return std::nullopt;
  const SmallMatrix gram = sigma * sigma.transpose();
  return SmallVector(gram.ldlt().solve(rhs));
}

void require_xstar(const OptimalWealth& xstar, const PathEnsemble& ensemble) {
  if (xstar.payoff.size() != static_cast<Eigen::Index>(ensemble.size()))
    throw ConfigError("sensitivity: optimal wealth samples do not match the ensemble");
}

ValueEstimate weighted_integral(const VectorField& integrand, const PathEnsemble& ensemble,
                                const OptimalWealth& xstar, const char* id) {
  require_xstar(xstar, ensemble);
  const PathFunctional integral = ito_integral(integrand, ensemble);
  return make_estimate(xstar.payoff.cwiseProduct(integral), ensemble.seed(), id);
}

void require_direction_kernel(const CoefficientProcess& sigma, const CoefficientProcess& dsigma) {
  // A direction keeps Ker(sigma) to first order iff its rows lie in the row
  // space of sigma, i.e. stacking it does not raise the rank.
  VectorField check({sigma, dsigma}, 1, [](std::span<const SmallMatrix* const> v) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 2 * kMaxDim, kMaxDim> stacked(
        2 * v[0]->rows(), v[0]->cols());
    stacked << *v[0], *v[1];
    Eigen::JacobiSVD<decltype(stacked)> svd(stacked);
    const auto& s = svd.singularValues();
    const int rank_stack = s(0) > 0.0 ? static_cast<int>((s.array() > kDefaultRankTol * s(0)).count()) : 0;
    SmallVector out(1);
    out(0) = rank_stack == numerical_rank(*v[0]) ? 1.0 : 0.0;
    return std::optional<SmallVector>(out);
  });
  for (int r = 0; r < check.regimes(); ++r)
    if (check.value(r)(0) == 0.0)
      throw KernelStabilityError("sensitivity: volatility direction changes the kernel of sigma");
}

}  // namespace

ValueEstimate weak_sens_mu(const MarketModel& model, const Utility& /*utility*/, const CoefficientProcess& dmu,
                           const PathEnsemble& ensemble, const OptimalWealth& xstar) {
  dmu.require_shape(model.assets, 1, model.factors, "drift direction");
  const double cap = model.condition_cap;
  VectorField integrand({model.volatility, dmu}, model.factors,
                        [cap](std::span<const SmallMatrix* const> v) -> std::optional<SmallVector> {
                          auto a = gram_solve(*v[0], v[1]->col(0), cap);
                          if (!a) return std::nullopt;
                          return SmallVector(v[0]->transpose() * *a);
                        });
  return weighted_integral(integrand, ensemble, xstar, "weak_sens_mu");
}

ValueEstimate weak_sens_sigma(const MarketModel& model, const Utility& /*utility*/,
                              const CoefficientProcess& dsigma, const PathEnsemble& ensemble,
                              const OptimalWealth& xstar) {
  dsigma.require_shape(model.assets, model.factors, model.factors, "volatility direction");
  require_direction_kernel(model.volatility, dsigma);
  const double cap = model.condition_cap;
  VectorField integrand(
      {model.drift, model.volatility, model.rate, dsigma}, model.factors,
      [cap](std::span<const SmallMatrix* const> v) -> std::optional<SmallVector> {
        const SmallMatrix& sigma = *v[1];
        const SmallMatrix& ds = *v[3];
        SmallVector excess = v[0]->col(0);
        excess.array() -= (*v[2])(0, 0);
        auto a = gram_solve(sigma, excess, cap);
        if (!a) return std::nullopt;
        auto b = gram_solve(sigma, (sigma * ds.transpose() + ds * sigma.transpose()) * *a, cap);
        return SmallVector(ds.transpose() * *a - sigma.transpose() * *b);
      });
  return weighted_integral(integrand, ensemble, xstar, "weak_sens_sigma");
}

ValueEstimate weak_sens_rate(const MarketModel& model, const Utility& utility, const CoefficientProcess& dr,
                             const PathEnsemble& ensemble, const OptimalWealth& xstar) {
  if (!utility.is_power()) throw ConfigError("weak_sens_rate: needs a power utility");
  dr.require_shape(1, 1, model.factors, "rate direction");
  require_xstar(xstar, ensemble);
  const double cap = model.condition_cap;
  VectorField integrand({model.volatility, dr}, model.factors,
                        [cap](std::span<const SmallMatrix* const> v) -> std::optional<SmallVector> {
                          SmallVector ones = SmallVector::Constant(v[0]->rows(), (*v[1])(0, 0));
                          auto a = gram_solve(*v[0], ones, cap);
                          if (!a) return std::nullopt;
                          return SmallVector(v[0]->transpose() * *a);
                        });
  const PathFunctional stochastic = ito_integral(integrand, ensemble);
  const PathFunctional drift = time_integral(VectorField::from_process(dr), ensemble);
  const Eigen::VectorXd samples =
      xstar.payoff.cwiseProduct((drift / utility.p() - stochastic).eval());
  return make_estimate(samples, ensemble.seed(), "weak_sens_rate");
}

ValueEstimate weak_sens_lambda(const MarketModel& model, const Utility& utility, const VectorField& lambda_at,
                               const VectorField& dlam, const PathEnsemble& ensemble) {
  if (model.factors != ensemble.dim()) throw ConfigError("weak_sens_lambda: dimension mismatch");
  const VectorField base = market_price_of_risk(model);
  const auto c = detail::evaluate_setting(base, lambda_at, VectorField::from_process(model.rate), ensemble,
                                          nullptr, &dlam);
  const Eigen::VectorXd g = c.log_weight.array().exp().matrix();
  Eigen::VectorXd weight = g;
  if (utility.is_power()) weight = weight.cwiseProduct(detail::discount_weight(utility, c.rate_integral));
  const Eigen::VectorXd z = (c.log_weight + c.log_density_shifted).array().exp().matrix();
  const StaticSolution sol = solve_static_budget(utility, model.initial_wealth, weight, z, {}, ensemble.seed());
  const Eigen::VectorXd payoff = detail::terminal_payoff(utility, sol.wealth, c.rate_integral);
  const Eigen::VectorXd samples = g.cwiseProduct(payoff).cwiseProduct(c.direction);
  return make_estimate(samples, ensemble.seed(), "weak_sens_lambda");
}

ValueEstimate weak_sens_lambda(const VectorField& dlam, const PathEnsemble& ensemble, const OptimalWealth& xstar) {
  return weighted_integral(dlam, ensemble, xstar, "weak_sens_lambda");
}

ValueEstimate weak_sensitivity(const MarketModel& model, const Utility& utility, const PerturbationSpec& pert,
                               const PathEnsemble& ensemble, const OptimalWealth& xstar) {
  require_xstar(xstar, ensemble);
  const auto dr = pert.rate_or_zero();
  const auto dsigma = pert.volatility_or_zero(model);
  if (!dsigma.is_zero()) require_direction_kernel(model.volatility, dsigma);
  const VectorField dl = dlambda_direction(model, pert.drift_or_zero(model), dsigma, dr);
  Eigen::VectorXd samples = xstar.payoff.cwiseProduct(ito_integral(dl, ensemble));
  if (!dr.is_zero()) {
    const PathFunctional rate_int = time_integral(VectorField::from_process(dr), ensemble);
    if (utility.is_power())
      samples += xstar.payoff.cwiseProduct(rate_int) / utility.p();
    else if (utility.kind() == Utility::Kind::log)
      samples += rate_int;
    else
      throw ConfigError("weak_sensitivity: rate directions need a power or log utility");
  }
  return make_estimate(std::move(samples), ensemble.seed(), "weak_sensitivity");
}

FdResult fd_sensitivity(const std::function<ValueEstimate(double)>& value_at, const std::vector<double>& eps) {
  if (eps.empty()) throw ConfigError("finite difference: empty step schedule");
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!(eps[i] > 0.0) || (i && !(eps[i] < eps[i - 1])))
      throw ConfigError("finite difference: steps must be positive and strictly decreasing");
  FdResult out;
  out.eps = eps;
  std::vector<ValueEstimate> central;
  for (double e : eps) {
    const ValueEstimate up = value_at(e);
    const ValueEstimate down = value_at(-e);
    central.push_back(make_linearized((up.mean - down.mean) / (2.0 * e),
                                      (up.influence - down.influence) / (2.0 * e), up.seed, "central_difference"));
    out.central.push_back(central.back().mean);
  }
  std::vector<ValueEstimate> extrapolated;
  for (std::size_t i = 1; i < central.size(); ++i) {
    const double rho2 = (eps[i - 1] / eps[i]) * (eps[i - 1] / eps[i]);
    extrapolated.push_back(combine(central[i], rho2 / (rho2 - 1.0), central[i - 1], -1.0 / (rho2 - 1.0),
                                   "richardson"));
    out.richardson.push_back(extrapolated.back().mean);
  }
  if (extrapolated.empty()) {
    out.estimate = central.back();
    return out;
  }
  out.estimate = extrapolated.back();
  out.bias = std::abs(central.back().mean - out.estimate.mean);
  if (extrapolated.size() >= 2) {
    const auto& prev = extrapolated[extrapolated.size() - 2];
    const double drift = std::abs(out.estimate.mean - prev.mean);
    out.converged = drift <= 3.0 * paired_std_error(out.estimate, prev) + 0.05 * std::abs(out.estimate.mean) + 1e-12;
  }
  return out;
}

SensitivityReport make_report(std::string direction, ValueEstimate formula, FdResult fd) {
  SensitivityReport r;
  r.direction = std::move(direction);
  r.gap = formula.mean - fd.estimate.mean;
  r.rel_gap = r.gap / std::max(std::abs(fd.estimate.mean), 1e-300);
  r.tolerance = 3.0 * paired_std_error(formula, fd.estimate) + fd.bias;
  r.pass = std::abs(r.gap) <= r.tolerance;
  r.formula = std::move(formula);
  r.fd = std::move(fd);
  return r;
}

SensitivityReport weak_report(const MarketModel& model, const Utility& utility, const PerturbationSpec& pert,
                              const PathEnsemble& ensemble, std::string direction,
                              const std::vector<double>& eps_schedule) {
  const OptimalWealth xstar = optimal_terminal_wealth(model, utility, ensemble);
  ValueEstimate formula = weak_sensitivity(model, utility, pert, ensemble, xstar);
  FdResult fd = fd_sensitivity(
      [&](double e) {
        PerturbationSpec at = pert;
        at.tau = e;
        return weak_value(model, utility, at, ensemble).value;
      },
      eps_schedule);
  return make_report(std::move(direction), std::move(formula), std::move(fd));
}

SensitivityReport gap_report(const MarketModel& model, const Utility& utility, const PerturbationSpec& pert,
                             const PathEnsemble& ensemble, std::string direction,
                             const std::vector<double>& eps_schedule) {
  const OptimalWealth xstar = optimal_terminal_wealth(model, utility, ensemble);
  ValueEstimate formula = weak_sensitivity(model, utility, pert, ensemble, xstar);
  FdResult fd = fd_sensitivity(
      [&](double e) {
        PerturbationSpec at = pert;
        at.tau = e;
        return strong_value(model, utility, at, ensemble);
      },
      eps_schedule);
  return make_report(std::move(direction), std::move(formula), std::move(fd));
}

void write_report_csv(std::ostream& os, const std::vector<SensitivityReport>& reports) {
  os << "direction,formula,se_formula,fd,se_fd,gap,verdict\n";
  for (const auto& r : reports)
    os << r.direction << ',' << format_double(r.formula.mean) << ',' << format_double(r.formula.std_error) << ','
       << format_double(r.fd.estimate.mean) << ',' << format_double(r.fd.estimate.std_error) << ','
       << format_double(r.gap) << ',' << (r.pass ? "pass" : "fail") << '\n';
}

Example1Report example1_report(double horizon, std::size_t paths, int steps, std::uint64_t seed) {
  const PathEnsemble ensemble(TimeGrid(horizon, steps), 1, paths, seed);
  const double dt = ensemble.grid().dt();
  const Eigen::MatrixXd cols = ensemble.map(2, [&](const Path& p, double* row) {
    double a = 0.0, b = 0.0;
    for (int k = 0; k < steps; ++k) {
      const double w = p.levels(k, 0);
      if (w < 0.0) {
        a += dt;
        b += w * dt;
      }
    }
    row[0] = a;
    row[1] = b;
  });
  Example1Report r;
  r.horizon = horizon;
  r.strong = make_estimate(cols.col(0), seed, "example1_strong");
  r.weak = make_estimate(cols.col(0) + 0.5 * cols.col(1), seed, "example1_weak");
  r.gap = make_estimate(0.5 * cols.col(1), seed, "example1_gap");
  r.strong_target = horizon / 2.0;
  r.gap_target = -std::pow(horizon, 1.5) / (3.0 * std::sqrt(2.0 * std::numbers::pi));
  r.weak_target = r.strong_target + r.gap_target;
  return r;
}

ValueEstimate example2_discrepancy(const VectorField& lambda, const VectorField& delta, const PathEnsemble& ensemble) {
  if (ensemble.dim() != 1 || lambda.width() != 1 || delta.width() != 1)
    throw ConfigError("example2: needs a one-dimensional model");
  const TimeGrid& grid = ensemble.grid();
  const double dt = grid.dt();
  const PathFunctional samples = ensemble.map_scalar([&](const Path& p) {
    NodeMatrix lam, del;
    lambda.fill(grid, p.levels, lam, p.index);
    delta.fill(grid, p.levels, del, p.index);
    const double weight = std::exp(ito_integral(lam, p) + 0.5 * time_integral(lam, dt, true));
    return weight * (ito_integral(del, p) - del.cwiseProduct(lam).sum() * dt);
  });
  return make_estimate(samples, ensemble.seed(), "example2_discrepancy");
}

SecondOrderReport second_order_check(const MarketModel& model, const Utility& utility, const VectorField& dlam,
                                     const std::vector<double>& eps_grid, const PathEnsemble& ensemble,
                                     double min_slope) {
  if (!utility.is_power()) throw ConfigError("second order check: needs a power utility");
  const VectorField base = market_price_of_risk(model);
  const double u0 = weak_value_lambda(model, utility, base, ensemble).value.mean;
  SecondOrderReport r;
  r.derivative = weak_sens_lambda(model, utility, base, dlam, ensemble).mean;
  r.eps = eps_grid;
  std::vector<double> lx, ly;
  for (double e : eps_grid) {
    const double u = weak_value_lambda(model, utility, VectorField::affine(base, 1.0, dlam, e), ensemble).value.mean;
    const double res = u - u0 - e * r.derivative;
    r.residual.push_back(res);
    r.negative_part.push_back(std::max(-res, 0.0));
    r.fitted_constant = std::max(r.fitted_constant, r.negative_part.back() / (e * e));
    if (r.negative_part.back() > 0.0) {
      lx.push_back(std::log(e));
      ly.push_back(std::log(r.negative_part.back()));
    }
  }
  r.fitted_points = static_cast<int>(lx.size());
  if (lx.size() >= 2) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    r.slope = sxy / sxx;
    r.pass = r.slope >= min_slope;
  } else {
    // A negative part that vanishes (or shows up at one step only) satisfies
    // the bound with the fitted constant and has no slope to fit.
    r.slope = std::numeric_limits<double>::quiet_NaN();
    r.pass = true;
  }
  return r;
}

}  // namespace wsens
