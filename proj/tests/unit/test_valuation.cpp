#include <wsens/wsens.hpp>

#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"

using namespace wsens;

namespace {

MarketModel two_asset() {
  return MarketModel(2, 2, CoefficientProcess::parse("const:[0.08,0.05]", 2, 1),
                     CoefficientProcess::parse("const:[0.2,0,0.05,0.25]", 2, 2),
                     CoefficientProcess::constant(0.01), 1.0);
}

PerturbationSpec two_asset_direction(double tau) {
  PerturbationSpec p;
  p.drift = CoefficientProcess::parse("const:[0.1,-0.05]", 2, 1);
  p.volatility = CoefficientProcess::parse("const:[0.05,0,0,0.05]", 2, 2);
  p.tau = tau;
  return p;
}

}  // namespace

TEST(Valuation, WeakEqualsStrongAtZero) {
  const MarketModel m(1, 1, CoefficientProcess::parse("ind:j=1;c=0;lo=[0.2];hi=[0.7]", 1, 1),
                      CoefficientProcess::constant(1.0), std::nullopt, 1.0);
  const PathEnsemble e(TimeGrid(1.0, 50), 1, 3000, 4);
  PerturbationSpec p;
  p.drift = CoefficientProcess::constant(0.3);
  for (const Utility& u : {Utility::sqrt(), Utility::log()}) {
    const auto w = weak_value(m, u, p, e);
    const auto s = strong_value(m, u, p, e);
    EXPECT_NEAR(w.value.mean, s.mean, 1e-12 * (1.0 + std::abs(s.mean)));
    EXPECT_EQ(w.weight_mean.mean, 1.0);
  }
}

TEST(Valuation, DeterministicCoefficientsCoincide) {
  const PathEnsemble e(TimeGrid(1.0, 50), 2, 20000, 19);
  const auto rows = value_surface(two_asset(), Utility::power(3.0), two_asset_direction(0.0), {0.0, 0.1, 0.2}, e);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_LE(std::abs(r.weak.mean - r.strong.mean), 3.0 * r.gap_std_error + 1e-12) << "tau " << r.tau;
    EXPECT_NEAR(r.weight_mean, 1.0, 0.05);
  }
}

TEST(Valuation, StrongValueMatchesClosedForm) {
  const MarketModel m(1, 1, CoefficientProcess::constant(0.5), CoefficientProcess::constant(1.0), std::nullopt, 1.0);
  const PathEnsemble e(TimeGrid(1.0, 20), 1, 30000, 3);
  PerturbationSpec p;
  p.drift = CoefficientProcess::constant(1.0);
  p.tau = 0.5;
  const auto s = strong_value(m, Utility::sqrt(), p, e);
  EXPECT_NEAR(s.mean, oracle::power_value(2.0, 1.0, 1.0, 1.0), 3.0 * s.std_error);
}

TEST(Valuation, LogWeakValueMatchesReweightedEnergy) {
  // Deterministic lambda: both values equal log x0 + 1/2 int |lambda^tau|^2 dt.
  const MarketModel m(1, 1, CoefficientProcess::constant(0.4), CoefficientProcess::constant(1.0), std::nullopt, 2.0);
  const PathEnsemble e(TimeGrid(1.0, 20), 1, 20000, 6);
  PerturbationSpec p;
  p.drift = CoefficientProcess::constant(1.0);
  p.tau = 0.2;
  const auto w = weak_value(m, Utility::log(), p, e);
  EXPECT_NEAR(w.value.mean, std::log(2.0) + 0.5 * 0.36, 3.0 * w.value.std_error);
  EXPECT_NEAR(strong_value(m, Utility::log(), p, e).mean, std::log(2.0) + 0.5 * 0.36, 1e-12);
}

TEST(Valuation, KernelRotationRefused) {
  const MarketModel m(1, 2, CoefficientProcess::constant(0.3), CoefficientProcess::parse("const:[1,0]", 1, 2),
                      std::nullopt, 1.0);
  const PathEnsemble e(TimeGrid(1.0, 10), 2, 100, 1);
  PerturbationSpec p;
  p.volatility = CoefficientProcess::parse("const:[0,1]", 1, 2);
  p.tau = 0.3;
  EXPECT_THROW(weak_value(m, Utility::sqrt(), p, e), KernelStabilityError);
}

TEST(Valuation, LambdaParametrizationAgrees) {
  const MarketModel m(1, 1, CoefficientProcess::parse("ind:j=1;c=0;lo=[0.2];hi=[0.7]", 1, 1),
                      CoefficientProcess::constant(1.0), std::nullopt, 1.0);
  const PathEnsemble e(TimeGrid(1.0, 50), 1, 2000, 4);
  PerturbationSpec p;
  p.drift = CoefficientProcess::constant(0.3);
  p.tau = 0.4;
  const auto lam = perturbed_price_of_risk(m, *p.drift, p.volatility_or_zero(m), p.rate_or_zero(), p.tau);
  EXPECT_NEAR(weak_value(m, Utility::sqrt(), p, e).value.mean, weak_value_lambda(m, Utility::sqrt(), lam, e).value.mean,
              1e-12);
  EXPECT_NEAR(strong_value(m, Utility::sqrt(), p, e).mean, strong_value_lambda(m, Utility::sqrt(), lam, e).mean,
              1e-12);
}

TEST(Valuation, SurfaceCsvHeader) {
  const PathEnsemble e(TimeGrid(1.0, 10), 2, 200, 2);
  const auto rows = value_surface(two_asset(), Utility::sqrt(), two_asset_direction(0.0), {0.0, 0.1}, e);
  std::ostringstream os;
  write_surface_csv(os, rows);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "tau,u_weak,se_weak,u_strong,se_strong,weight_mean,seed");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}
