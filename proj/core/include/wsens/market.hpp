#pragma once

#include "wsens/coefficient.hpp"
#include "wsens/field.hpp"
#include "wsens/paths.hpp"

#include <optional>

namespace wsens {

/// Default cap on cond(sigma sigma^T) beyond which the inverse is treated as
/// unbounded.
inline constexpr double kDefaultConditionCap = 1e8;
/// Default relative singular-value threshold for numerical rank.
inline constexpr double kDefaultRankTol = 1e-10;

/// d assets driven by an n-dimensional Brownian motion (n >= d).
struct MarketModel {
  int assets = 1;
  int factors = 1;
  CoefficientProcess drift = CoefficientProcess::zero(1, 1);       // d x 1
  CoefficientProcess volatility = CoefficientProcess::constant(1.0);  // d x n
  CoefficientProcess rate = CoefficientProcess::zero(1, 1);        // 1 x 1
  double initial_wealth = 1.0;
  double condition_cap = kDefaultConditionCap;

  MarketModel() = default;
  MarketModel(int d, int n, CoefficientProcess mu, CoefficientProcess sigma,
              std::optional<CoefficientProcess> r, double x0);

  /// Throws ConfigError on inconsistent shapes or parameters.
  void validate() const;
  bool deterministic() const noexcept;
  bool complete() const noexcept { return assets == factors; }
  bool has_rate() const noexcept { return !rate.is_zero(); }
};

/// sigma^T (sigma sigma^T)^{-1} (mu - r 1), or nullopt when sigma sigma^T is
/// singular or worse conditioned than `cap`.
std::optional<SmallVector> price_of_risk(const SmallMatrix& sigma, const SmallVector& mu, double r,
                                         double cap = kDefaultConditionCap);

/// Node values 0..N of a coefficient along one path, flattened row-major.
NodeMatrix evaluate_coefficient(const CoefficientProcess& proc, const Path& path,
                                const TimeGrid& grid);

/// The market price of risk as a tabulated field.
VectorField market_price_of_risk(const MarketModel& model);
/// Left-point market price of risk along one path (N x n).
NodeMatrix market_price_of_risk(const MarketModel& model, const Path& path, const TimeGrid& grid);

/// Market price of risk of (mu + tau dmu, sigma + tau dsigma, r + tau dr).
VectorField perturbed_price_of_risk(const MarketModel& model, const CoefficientProcess& dmu,
                                    const CoefficientProcess& dsigma, const CoefficientProcess& dr,
                                    double tau);
/// r + tau dr as a width-1 field.
VectorField perturbed_rate(const MarketModel& model, const CoefficientProcess& dr, double tau);

struct H1Report {
  bool full_rank = true;
  double inv_bound = 0.0;  // max ||(sigma sigma^T)^{-1}||_2 over visited nodes, base and perturbed
  bool kernel_equal = true;
  std::size_t worst_path = NumericalError::npos;
  std::size_t worst_node = NumericalError::npos;
  double worst_time = 0.0;

  bool passed() const noexcept { return full_rank && kernel_equal; }
};

/// Per joint regime of (base, dsigma): [kernel equal, both full rank,
/// ||(sigma sigma^T)^{-1}||] for sigma_pert = base + tau dsigma.
VectorField h1_field(const CoefficientProcess& sigma_base, const CoefficientProcess& dsigma, double tau,
                     double tol = kDefaultRankTol, double cap = kDefaultConditionCap);

/// Kernel-stability check of sigma_pert against sigma_base at every node of
/// every path. Deterministic volatilities are checked on one path only.
H1Report check_h1(const CoefficientProcess& sigma_base, const CoefficientProcess& sigma_pert,
                  const PathEnsemble& ensemble, double tol = kDefaultRankTol,
                  double cap = kDefaultConditionCap);
/// Same for sigma_base + tau dsigma.
H1Report check_h1(const CoefficientProcess& sigma_base, const CoefficientProcess& dsigma, double tau,
                  const PathEnsemble& ensemble, double tol = kDefaultRankTol,
                  double cap = kDefaultConditionCap);

int numerical_rank(const SmallMatrix& m, double tol = kDefaultRankTol);

struct KernelPerturbation {
  CoefficientProcess volatility = CoefficientProcess::zero(1, 1);
  /// sigma_base + tau A (sigma sigma^T)^{-1} sigma_base keeps full rank for |tau| below this.
  double safe_bound = 0.0;
  bool warning = false;
};

/// sigma_base + tau A (sigma_base sigma_base^T)^{-1} sigma_base, which keeps
/// the kernel of sigma_base. The result must be representable as a single
/// coefficient process: at most one non-constant input, two piecewise inputs,
/// or two indicators on the same driver and threshold.
KernelPerturbation kernel_preserving_perturbation(const CoefficientProcess& sigma_base,
                                                  const CoefficientProcess& a, double tau);

/// Directional derivative of the market price of risk along (dmu, dsigma, dr)
/// at the model's coefficients.
VectorField dlambda_direction(const MarketModel& model, const CoefficientProcess& dmu,
                              const CoefficientProcess& dsigma,
                              const std::optional<CoefficientProcess>& dr = std::nullopt);
NodeMatrix dlambda_direction(const MarketModel& model, const CoefficientProcess& dmu,
                             const CoefficientProcess& dsigma, const Path& path, const TimeGrid& grid);

}  // namespace wsens
