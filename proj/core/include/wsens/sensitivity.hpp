#pragma once

#include "wsens/estimate.hpp"
#include "wsens/market.hpp"
#include "wsens/solver.hpp"
#include "wsens/valuation.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace wsens {

inline const std::vector<double> kDefaultEpsSchedule{0.2, 0.1, 0.05, 0.025};

// Closed-form weak directional derivatives at the base coefficients. Each
// is the Monte Carlo mean of U(X*_T) times a stochastic integral, where
// `xstar` holds the base optimizer.

/// Integrand sigma^T (sigma sigma^T)^{-1} dmu.
ValueEstimate weak_sens_mu(const MarketModel& model, const Utility& utility, const CoefficientProcess& dmu,
                           const PathEnsemble& ensemble, const OptimalWealth& xstar);
/// Integrand dsigma^T G a - sigma^T G (sigma dsigma^T + dsigma sigma^T) G a with
/// G = (sigma sigma^T)^{-1}, a = mu - r 1. Refuses directions that change the kernel.
ValueEstimate weak_sens_sigma(const MarketModel& model, const Utility& utility, const CoefficientProcess& dsigma,
                              const PathEnsemble& ensemble, const OptimalWealth& xstar);
/// Power utility only: mean of U(X_T) {(1/p) int dr dt - int [sigma^T G dr 1] dW}.
ValueEstimate weak_sens_rate(const MarketModel& model, const Utility& utility, const CoefficientProcess& dr,
                             const PathEnsemble& ensemble, const OptimalWealth& xstar);

/// Derivative of the weak value along dlam at an arbitrary price of risk
/// `lambda_at`: mean of G U(X[lambda]) {int dlam dW - int (lambda - base) . dlam dt}.
ValueEstimate weak_sens_lambda(const MarketModel& model, const Utility& utility, const VectorField& lambda_at,
                               const VectorField& dlam, const PathEnsemble& ensemble);
/// At the base price of risk with a known optimizer: mean of U(X*_T) int dlam dW.
ValueEstimate weak_sens_lambda(const VectorField& dlam, const PathEnsemble& ensemble, const OptimalWealth& xstar);

/// Full weak derivative along (dmu, dsigma, dr) of `pert` (tau is ignored).
ValueEstimate weak_sensitivity(const MarketModel& model, const Utility& utility, const PerturbationSpec& pert,
                               const PathEnsemble& ensemble, const OptimalWealth& xstar);

struct FdResult {
  std::vector<double> eps;
  std::vector<double> central;     // (u(+eps) - u(-eps)) / (2 eps)
  std::vector<double> richardson;  // extrapolations of consecutive central differences
  ValueEstimate estimate;          // last extrapolation, with influence values
  double bias = 0.0;               // |last central - last extrapolation|
  bool converged = true;
};

/// Central differences of `value_at(eps)` over a decreasing schedule with
/// Richardson extrapolation. value_at must use common random numbers.
FdResult fd_sensitivity(const std::function<ValueEstimate(double)>& value_at,
                        const std::vector<double>& eps_schedule = kDefaultEpsSchedule);

struct SensitivityReport {
  std::string direction;
  ValueEstimate formula;
  FdResult fd;
  double gap = 0.0;
  double rel_gap = 0.0;
  double tolerance = 0.0;  // 3 paired standard errors + finite-difference bias
  bool pass = false;
};

SensitivityReport make_report(std::string direction, ValueEstimate formula, FdResult fd);

/// Weak formula against the finite difference of the weak value along `pert`.
SensitivityReport weak_report(const MarketModel& model, const Utility& utility, const PerturbationSpec& pert,
                              const PathEnsemble& ensemble, std::string direction,
                              const std::vector<double>& eps_schedule = kDefaultEpsSchedule);
/// Weak formula against the finite difference of the strong value. A failing
/// verdict here is a measured weak/strong gap rather than an error.
SensitivityReport gap_report(const MarketModel& model, const Utility& utility, const PerturbationSpec& pert,
                             const PathEnsemble& ensemble, std::string direction,
                             const std::vector<double>& eps_schedule = kDefaultEpsSchedule);

/// Columns direction,formula,se_formula,fd,se_fd,gap,verdict.
void write_report_csv(std::ostream& os, const std::vector<SensitivityReport>& reports);

struct Example1Report {
  double horizon = 0.0;
  ValueEstimate strong;  // E int lambda dt
  ValueEstimate weak;    // E int lambda dt + 1/2 E int W_t lambda_t^2 dt
  ValueEstimate gap;     // weak - strong on common paths
  double strong_target = 0.0;
  double weak_target = 0.0;
  double gap_target = 0.0;
};

/// lambda_t = 1{W_t < 0}, unit direction, log utility.
Example1Report example1_report(double horizon, std::size_t paths, int steps, std::uint64_t seed);

/// Mean of exp(int lambda dW + 1/2 int lambda^2 dt) (int delta dW - int delta lambda dt)
/// for a one-dimensional model; zero iff weak and strong sensitivities agree.
ValueEstimate example2_discrepancy(const VectorField& lambda, const VectorField& delta,
                                   const PathEnsemble& ensemble);

struct SecondOrderReport {
  std::vector<double> eps;
  std::vector<double> residual;       // u(base + eps dlam) - u(base) - eps Du
  std::vector<double> negative_part;  // max(-residual, 0)
  double derivative = 0.0;
  double fitted_constant = 0.0;       // max negative_part / eps^2
  double slope = 0.0;                 // log-log slope of the negative part (NaN if < 2 points)
  int fitted_points = 0;
  bool pass = false;
};

/// Checks residual >= -C eps^2 and, when the negative part is non-zero on at
/// least two points, that its log-log slope is at least `min_slope`.
SecondOrderReport second_order_check(const MarketModel& model, const Utility& utility, const VectorField& dlam,
                                     const std::vector<double>& eps_grid, const PathEnsemble& ensemble,
                                     double min_slope = 1.8);

}  // namespace wsens
