#include "wsens/modular.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>

namespace wsens {

namespace {

void require_family(const std::vector<PathFunctional>& densities, Eigen::Index size) {
  if (densities.empty()) throw ConfigError("modular: empty density family");
  for (const auto& y : densities)
    if (y.size() != size) throw ConfigError("modular: density and sample sizes differ");
}

}  // namespace

std::vector<PathFunctional> kernel_densities(const MarketModel& model, const std::vector<CoefficientProcess>& family,
                                             const PathEnsemble& ensemble, double tol) {
  if (model.factors != ensemble.dim()) throw ConfigError("modular: dimension mismatch");
  const VectorField lambda = market_price_of_risk(model);
  // nu = 0 always belongs to the kernel.
  std::vector<PathFunctional> out{stochastic_exponential(VectorField::affine(lambda, -1.0, lambda, 0.0), ensemble)};
  for (const auto& nu : family) {
    nu.require_shape(model.factors, 1, model.factors, "kernel direction");
    VectorField check({model.volatility, nu}, 1, [tol](std::span<const SmallMatrix* const> v) {
      SmallVector r(1);
      const double scale = std::max(1.0, v[0]->norm() * v[1]->norm());
      r(0) = (*v[0] * v[1]->col(0)).norm() <= tol * scale ? 1.0 : 0.0;
      return std::optional<SmallVector>(r);
    });
    for (int r = 0; r < check.regimes(); ++r)
      if (check.value(r)(0) == 0.0) throw ConfigError("modular: family member is not in the kernel of sigma");
    const VectorField shift = VectorField::affine(lambda, -1.0, VectorField::from_process(nu), -1.0);
    out.push_back(stochastic_exponential(shift, ensemble));
  }
  return out;
}

ValueEstimate j_functional(const PathFunctional& z, const Utility& utility,
                           const std::vector<PathFunctional>& densities) {
  require_family(densities, z.size());
  Eigen::VectorXd inv(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) inv[i] = utility.inverse(std::abs(z[i]));
  ValueEstimate best;
  bool first = true;
  for (const auto& y : densities) {
    ValueEstimate e = make_estimate(y.cwiseProduct(inv), 0, "j_functional");
    if (first || e.mean > best.mean) best = std::move(e);
    first = false;
  }
  return best;
}

ValueEstimate i_modular(const PathFunctional& z, const Utility& utility,
                        const std::vector<PathFunctional>& densities) {
  require_family(densities, z.size());
  ValueEstimate best;
  bool first = true;
  for (const auto& y : densities) {
    Eigen::VectorXd s(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double a = std::abs(z[i]);
      s[i] = a == 0.0 ? 0.0 : a * utility.conjugate(y[i] / a);
    }
    ValueEstimate e = make_estimate(std::move(s), 0, "i_modular");
    if (first || e.mean < best.mean) best = std::move(e);
    first = false;
  }
  return best;
}

double i_modular_power(const PathFunctional& z, double q, const std::vector<PathFunctional>& densities) {
  require_family(densities, z.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& y : densities) {
    const Eigen::VectorXd s = (y.array().pow(1.0 - q) * z.array().abs().pow(q)).matrix();
    best = std::min(best, stable_mean(s));
  }
  return best;
}

double norm_i(const PathFunctional& z, double q, const std::vector<PathFunctional>& densities) {
  return std::pow(i_modular_power(z, q, densities), 1.0 / q);
}

double norm_j(const PathFunctional& x, double p, const std::vector<PathFunctional>& densities) {
  require_family(densities, x.size());
  double best = 0.0;
  for (const auto& y : densities)
    best = std::max(best, stable_mean((y.array() * x.array().abs().pow(p)).matrix()));
  return std::pow(best, 1.0 / p);
}

double luxemburg_norm(const ScaleModular& phi) {
  // phi is nondecreasing in s >= 0; the norm is 1 / sup { s : phi(s) <= 1 }.
  if (phi(1e300) <= 1.0) return 0.0;
  double lo = 1.0, hi = 1.0;  // phi(lo) <= 1 < phi(hi)
  int expand = 0;
  while (phi(lo) > 1.0) {
    lo /= 2.0;
    if (++expand > 2000) return std::numeric_limits<double>::infinity();
  }
  while (phi(hi) <= 1.0) {
    hi *= 2.0;
    if (++expand > 4000) return 0.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) <= 1.0 ? lo : hi) = mid;
  }
  return 1.0 / (0.5 * (lo + hi));
}

double amemiya_norm(const ScaleModular& phi) {
  if (phi(1e300) == 0.0) return 0.0;
  auto objective = [&](double logk) {
    const double k = std::exp(logk);
    const double v = (1.0 + phi(k)) / k;
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };
  // Coarse scan on log k, then refine around the best grid point.
  double best_x = 0.0, best_v = objective(0.0);
  for (double x = -60.0; x <= 60.0; x += 0.5) {
    const double v = objective(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  auto refined = boost::math::tools::brent_find_minima(objective, best_x - 0.5, best_x + 0.5, 52);
  return std::min(best_v, refined.second);
}

HolderReport holder_check(const PathFunctional& y, const PathFunctional& z, double p,
                          const std::vector<PathFunctional>& densities, double slack) {
  if (y.size() != z.size()) throw ConfigError("holder check: sample sizes differ");
  HolderReport r;
  r.lhs = stable_mean(y.cwiseProduct(z).cwiseAbs());
  r.norm_i = norm_i(y, p / (p - 1.0), densities);
  r.norm_j = norm_j(z, p, densities);
  const double rhs = r.norm_i * r.norm_j;
  r.ratio = rhs > 0.0 ? r.lhs / rhs : (r.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  r.holds = r.lhs <= rhs * (1.0 + slack);
  return r;
}

}  // namespace wsens
