#pragma once

// Per-path quantities shared by the solver, valuation and sensitivity code.

#include "wsens/field.hpp"
#include "wsens/paths.hpp"
#include "wsens/utility.hpp"

namespace wsens::detail {

struct SettingColumns {
  Eigen::VectorXd log_weight;        // log E(int (lambda_new - lambda_base) dW)
  Eigen::VectorXd log_density_base;  // log E(-int lambda_base dW)
  Eigen::VectorXd log_density_new;   // log E(-int lambda_new dW), strong density
  Eigen::VectorXd log_density_shifted;  // log E(-int lambda_new dW^new), W^new = W - int (lambda_new - lambda_base) dt
  Eigen::VectorXd rate_integral;     // int r dt
  Eigen::VectorXd half_energy;       // 1/2 int |lambda_new|^2 dt
  Eigen::VectorXd direction;         // int dlam dW - int (lambda_new - lambda_base) . dlam dt
};

/// `h1`, when given, is a field from h1_field(); a failing node raises
/// KernelStabilityError.
SettingColumns evaluate_setting(const VectorField& lambda_base, const VectorField& lambda_new,
                                const VectorField& rate, const PathEnsemble& ensemble,
                                const VectorField* h1 = nullptr, const VectorField* direction = nullptr);

/// Weight multiplying U(discounted wealth): exp(int r / p) for power
/// utilities, 1 otherwise.
Eigen::VectorXd discount_weight(const Utility& utility, const Eigen::VectorXd& rate_integral);

/// Terminal utility from discounted wealth.
Eigen::VectorXd terminal_payoff(const Utility& utility, const Eigen::VectorXd& xhat,
                                const Eigen::VectorXd& rate_integral);

}  // namespace wsens::detail
