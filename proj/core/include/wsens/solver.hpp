#pragma once

#include "wsens/estimate.hpp"
#include "wsens/market.hpp"
#include "wsens/paths.hpp"
#include "wsens/utility.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

namespace wsens {

struct SolverOptions {
  /// Use bisection on the multiplier even when a closed form exists.
  bool force_bisection = false;
  double rel_tol = 1e-12;
  int max_iter = 200;
  /// Initial multiplier bracket; must straddle the root when given.
  std::optional<std::pair<double, double>> bracket;
};

/// Solution of max mean(w U(X)) subject to mean(z X) = x0 on a finite sample.
struct StaticSolution {
  Eigen::VectorXd wealth;
  double multiplier = 0.0;
  ValueEstimate value;
  int iterations = 0;
};

/// The first-order condition gives X = (U')^{-1}(y z / w); y is found in
/// closed form for power and log utilities and by bisection otherwise.
StaticSolution solve_static_budget(const Utility& utility, double x0, const Eigen::VectorXd& weight,
                                   const Eigen::VectorXd& density, const SolverOptions& options = {},
                                   std::uint64_t seed = 0, std::string estimator = "static_budget");

/// Z_T = E(-int lambda^T dW)_T with the minimal (nu = 0) density.
PathFunctional state_price_density(const MarketModel& model, const PathEnsemble& ensemble);

struct OptimalWealth {
  /// Optimal terminal wealth discounted by the bank account (the plain
  /// terminal wealth when the rate is zero).
  Eigen::VectorXd xstar;
  double multiplier = 0.0;
  PathFunctional density;
  /// U of the undiscounted terminal wealth, path by path.
  Eigen::VectorXd payoff;
  ValueEstimate value;
  /// mean(Z X*) with its standard error.
  ValueEstimate budget;
};

/// Optimal terminal wealth for complete markets or deterministic coefficients.
OptimalWealth optimal_terminal_wealth(const MarketModel& model, const Utility& utility,
                                      const PathEnsemble& ensemble, const SolverOptions& options = {});

/// Wraps externally supplied optimal wealth samples (discounted) so they can
/// feed the sensitivity estimators.
OptimalWealth external_wealth(const MarketModel& model, const Utility& utility, const PathEnsemble& ensemble,
                              Eigen::VectorXd xstar);

struct ClosedFormValue {
  double value = 0.0;
  std::string formula;
  std::string digest;
};

/// Log utility: log x0 + 1/2 E int |lambda|^2 dt (+ E int r dt), averaged over
/// `ensemble` when lambda is adapted. Power utility with deterministic lambda:
/// p x0^{1/p} exp((q - 1)/2 int |lambda|^2 dt + 1/p int r dt).
ClosedFormValue value_closed_form(const MarketModel& model, const Utility& utility,
                                  const PathEnsemble* ensemble = nullptr);

/// CSV with header `path_index,xstar`.
void write_xstar_csv(std::ostream& os, const Eigen::VectorXd& xstar);
Eigen::VectorXd read_xstar_csv(std::istream& is);

}  // namespace wsens
