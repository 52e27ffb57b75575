#pragma once

#include "wsens/estimate.hpp"
#include "wsens/market.hpp"
#include "wsens/utility.hpp"

#include <functional>
#include <vector>

namespace wsens {

/// Densities Y^nu = E(-int (lambda + nu) dW)_T for a finite family of kernel
/// directions nu (sigma nu = 0). The first entry is always nu = 0.
std::vector<PathFunctional> kernel_densities(const MarketModel& model, const std::vector<CoefficientProcess>& family,
                                             const PathEnsemble& ensemble, double tol = 1e-10);

/// max over the family of mean Y^nu U^{-1}(|Z|). The returned estimate is the
/// maximizing member's.
ValueEstimate j_functional(const PathFunctional& z, const Utility& utility,
                           const std::vector<PathFunctional>& densities);
/// min over the family of mean |Z| V(Y^nu / |Z|), with 0 V(y / 0) = 0.
ValueEstimate i_modular(const PathFunctional& z, const Utility& utility,
                        const std::vector<PathFunctional>& densities);
/// Power case: min over the family of mean (Y^nu)^{1-q} |Z|^q.
double i_modular_power(const PathFunctional& z, double q, const std::vector<PathFunctional>& densities);
/// (min mean Y^{1-q} |Z|^q)^{1/q}.
double norm_i(const PathFunctional& z, double q, const std::vector<PathFunctional>& densities);
/// (max mean Y |X|^p)^{1/p}.
double norm_j(const PathFunctional& x, double p, const std::vector<PathFunctional>& densities);

/// phi(s) = F(s Z) for a convex modular F with F(0) = 0.
using ScaleModular = std::function<double(double)>;

/// inf { beta > 0 : F(Z / beta) <= 1 }. Infinite when no scale works.
double luxemburg_norm(const ScaleModular& phi);
/// inf over k > 0 of (1 + F(k Z)) / k.
double amemiya_norm(const ScaleModular& phi);

struct HolderReport {
  double lhs = 0.0;  // mean |Y Z|
  double norm_i = 0.0;
  double norm_j = 0.0;
  double ratio = 0.0;  // lhs / (norm_i norm_j)
  bool holds = false;
};

/// mean |Y Z| <= norm_i(Y) norm_j(Z) (1 + slack).
HolderReport holder_check(const PathFunctional& y, const PathFunctional& z, double p,
                          const std::vector<PathFunctional>& densities, double slack = 1e-12);

}  // namespace wsens
