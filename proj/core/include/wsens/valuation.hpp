#pragma once

#include "wsens/estimate.hpp"
#include "wsens/market.hpp"
#include "wsens/solver.hpp"
#include "wsens/utility.hpp"

#include <iosfwd>
#include <vector>

namespace wsens {

/// mu + tau dmu, sigma + tau dsigma, r + tau dr. Unset directions are zero.
struct PerturbationSpec {
  std::optional<CoefficientProcess> drift;
  std::optional<CoefficientProcess> volatility;
  std::optional<CoefficientProcess> rate;
  double tau = 0.0;

  CoefficientProcess drift_or_zero(const MarketModel& m) const;
  CoefficientProcess volatility_or_zero(const MarketModel& m) const;
  CoefficientProcess rate_or_zero() const;
};

struct WeakValue {
  ValueEstimate value;
  /// Mean of the density dP^tau/dP; should be 1 up to Monte Carlo error.
  ValueEstimate weight_mean;
};

/// Value of the problem whose wealth dynamics keep the base coefficients while
/// the measure moves to P^tau. Refuses (KernelStabilityError) when the
/// perturbed volatility changes the kernel of the base one.
WeakValue weak_value(const MarketModel& model, const Utility& utility, const PerturbationSpec& pert,
                     const PathEnsemble& ensemble);
/// Value of the problem with perturbed coefficients under the original measure.
ValueEstimate strong_value(const MarketModel& model, const Utility& utility, const PerturbationSpec& pert,
                           const PathEnsemble& ensemble);

/// Same values parametrized directly by the market price of risk `lambda`
/// (the model supplies the base lambda, the rate and x0).
WeakValue weak_value_lambda(const MarketModel& model, const Utility& utility, const VectorField& lambda,
                            const PathEnsemble& ensemble);
ValueEstimate strong_value_lambda(const MarketModel& model, const Utility& utility, const VectorField& lambda,
                                  const PathEnsemble& ensemble);

struct SurfaceRow {
  double tau = 0.0;
  ValueEstimate weak;
  ValueEstimate strong;
  double weight_mean = 1.0;
  double gap_std_error = 0.0;  // standard error of weak - strong on common paths
};

/// Weak and strong values over a tau grid on a shared ensemble.
std::vector<SurfaceRow> value_surface(const MarketModel& model, const Utility& utility,
                                      const PerturbationSpec& pert, const std::vector<double>& tau_grid,
                                      const PathEnsemble& ensemble);

/// Columns tau,u_weak,se_weak,u_strong,se_strong,weight_mean,seed.
void write_surface_csv(std::ostream& os, const std::vector<SurfaceRow>& rows);

}  // namespace wsens
