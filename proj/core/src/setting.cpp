#include "setting.hpp"

#include <cmath>

namespace wsens::detail {

SettingColumns evaluate_setting(const VectorField& lambda_base, const VectorField& lambda_new,
                                const VectorField& rate, const PathEnsemble& ensemble, const VectorField* h1,
                                const VectorField* direction) {
  const int n = ensemble.dim();
  if (lambda_base.width() != n || lambda_new.width() != n || rate.width() != 1)
    throw ConfigError("setting: field widths do not match the ensemble");
  if (direction && direction->width() != n) throw ConfigError("setting: direction width does not match the ensemble");
  const TimeGrid& grid = ensemble.grid();
  const double dt = grid.dt();
  const Eigen::MatrixXd cols = ensemble.map(7, [&](const Path& p, double* row) {
    NodeMatrix base, lam, r;
    lambda_base.fill(grid, p.levels, base, p.index);
    lambda_new.fill(grid, p.levels, lam, p.index);
    rate.fill(grid, p.levels, r, p.index);
    if (h1) {
      for (int k = 0; k < grid.steps(); ++k) {
        const SmallVector& v = h1->value(h1->regime(grid.time(k), p.levels.row(k).data()));
        if (v(0) == 0.0 || v(1) == 0.0)
          throw KernelStabilityError("perturbed volatility violates kernel stability at path " +
                                         std::to_string(p.index) + ", node " + std::to_string(k),
                                     p.index, static_cast<std::size_t>(k));
      }
    }
    const NodeMatrix diff = lam - base;
    row[0] = log_stochastic_exponential(diff, p, dt);
    row[1] = -ito_integral(base, p) - 0.5 * time_integral(base, dt, true);
    row[2] = -ito_integral(lam, p) - 0.5 * time_integral(lam, dt, true);
    row[3] = time_integral(r, dt);
    row[4] = 0.5 * time_integral(lam, dt, true);
    // Ito integral against the shifted increments dW - (lam - base) dt.
    const double drift_term = lam.cwiseProduct(diff).sum() * dt;
    row[5] = -ito_integral(lam, p) + drift_term - 0.5 * time_integral(lam, dt, true);
    row[6] = 0.0;
    if (direction) {
      NodeMatrix dl;
      direction->fill(grid, p.levels, dl, p.index);
      row[6] = ito_integral(dl, p) - diff.cwiseProduct(dl).sum() * dt;
    }
  });
  return {cols.col(0), cols.col(1), cols.col(2), cols.col(5), cols.col(3), cols.col(4), cols.col(6)};
}

Eigen::VectorXd discount_weight(const Utility& utility, const Eigen::VectorXd& rate_integral) {
  if (!utility.is_power()) return Eigen::VectorXd::Ones(rate_integral.size());
  return (rate_integral.array() / utility.p()).exp().matrix();
}

Eigen::VectorXd terminal_payoff(const Utility& utility, const Eigen::VectorXd& xhat,
                                const Eigen::VectorXd& rate_integral) {
  Eigen::VectorXd out(xhat.size());
  for (Eigen::Index i = 0; i < xhat.size(); ++i) {
    if (utility.is_power())
      out[i] = std::exp(rate_integral[i] / utility.p()) * utility.value(xhat[i]);
    else if (utility.kind() == Utility::Kind::log)
      out[i] = rate_integral[i] + utility.value(xhat[i]);
    else
      out[i] = utility.value(std::exp(rate_integral[i]) * xhat[i]);
  }
  return out;
}

}  // namespace wsens::detail
