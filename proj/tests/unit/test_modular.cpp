#include <wsens/wsens.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace wsens;

namespace {

std::vector<PathFunctional> random_densities(std::mt19937_64& rng, int m, int count) {
  std::lognormal_distribution<double> ln(-0.125, 0.5);
  std::vector<PathFunctional> out;
  for (int k = 0; k < count; ++k) {
    PathFunctional y(m);
    for (auto& v : y) v = ln(rng);
    out.push_back(y / y.mean());
  }
  return out;
}

PathFunctional random_positive(std::mt19937_64& rng, int m) {
  std::lognormal_distribution<double> ln(0.0, 1.0);
  PathFunctional z(m);
  for (auto& v : z) v = ln(rng);
  return z;
}

}  // namespace

TEST(Modular, NormsArePositivelyHomogeneous) {
  std::mt19937_64 rng(1);
  const auto dens = random_densities(rng, 300, 3);
  const PathFunctional z = random_positive(rng, 300);
  for (double p : {2.0, 3.0}) {
    const double q = p / (p - 1.0);
    for (double s : {0.25, 3.0, 1e3}) {
      EXPECT_NEAR(norm_i((s * z).eval(), q, dens), s * norm_i(z, q, dens), 1e-12 * s * norm_i(z, q, dens));
      EXPECT_NEAR(norm_j((s * z).eval(), p, dens), s * norm_j(z, p, dens), 1e-12 * s * norm_j(z, p, dens));
    }
    EXPECT_EQ(norm_i(PathFunctional::Zero(300), q, dens), 0.0);
  }
}

TEST(Modular, LuxemburgAndAmemiyaOfPowerModular) {
  // phi(s) = c s^p: Luxemburg c^{1/p}, Amemiya p/(p-1) (c (p-1))^{1/p}.
  for (double p : {1.5, 2.0, 3.0}) {
    for (double c : {0.3, 1.0, 7.0}) {
      auto phi = [=](double s) { return c * std::pow(std::abs(s), p); };
      EXPECT_NEAR(luxemburg_norm(phi), std::pow(c, 1.0 / p), 1e-10);
      EXPECT_NEAR(amemiya_norm(phi), p / (p - 1.0) * std::pow(c * (p - 1.0), 1.0 / p), 1e-9);
      // Both norms are equivalent: L <= A <= 2 L.
      EXPECT_LE(luxemburg_norm(phi), amemiya_norm(phi) + 1e-12);
      EXPECT_LE(amemiya_norm(phi), 2.0 * luxemburg_norm(phi) + 1e-12);
    }
  }
}

TEST(Modular, HolderInequalityOnRandomPairs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const double p = 1.2 + 3.0 * std::uniform_real_distribution<double>()(rng);
    const auto dens = random_densities(rng, 200, 1 + trial % 4);
    const PathFunctional y = random_positive(rng, 200);
    const PathFunctional z = random_positive(rng, 200);
    const auto h = holder_check(y, z, p, dens);
    EXPECT_TRUE(h.holds) << "trial " << trial << " ratio " << h.ratio;
    EXPECT_LE(h.ratio, 1.0 + 1e-12);
  }
}

TEST(Modular, ConjugateModularIsScaledPowerModular) {
  std::mt19937_64 rng(3);
  const auto dens = random_densities(rng, 100, 2);
  const PathFunctional z = random_positive(rng, 100);
  const Utility u = Utility::power(3.0);
  EXPECT_NEAR(i_modular(z, u, dens).mean, (u.p() - 1.0) * i_modular_power(z, u.q(), dens), 1e-10);
}

TEST(Modular, BudgetIdentityAndNormBound) {
  MarketModel m(1, 2, CoefficientProcess::constant(0.5), CoefficientProcess::parse("const:[1,0]", 1, 2), std::nullopt,
                1.0);
  const PathEnsemble e(TimeGrid(1.0, 20), 2, 20000, 17);
  const Utility u = Utility::sqrt();
  const auto dens = kernel_densities(m, {CoefficientProcess::parse("const:[0,0.3]", 2, 1)}, e);
  ASSERT_EQ(dens.size(), 2u);
  const auto opt = optimal_terminal_wealth(m, u, e);
  PathFunctional ux(opt.xstar.size());
  for (Eigen::Index i = 0; i < ux.size(); ++i) ux[i] = u.value(opt.xstar[i]);
  const auto j = j_functional(ux, u, dens);
  EXPECT_NEAR(j.mean, 1.0, 3.0 * j.std_error);
  // nu = 0 reproduces the budget exactly.
  EXPECT_NEAR(dens[0].cwiseProduct(opt.xstar).mean(), 1.0, 1e-12);
  const double amemiya = amemiya_norm([&](double s) { return s * s * j.mean; });
  EXPECT_LE(amemiya, 1.0 + j.mean + 1e-12);
  EXPECT_LE(amemiya, 2.0 + 3.0 * j.std_error);
}

TEST(Modular, NonKernelDirectionRejected) {
  MarketModel m(1, 2, CoefficientProcess::constant(0.5), CoefficientProcess::parse("const:[1,0]", 1, 2), std::nullopt,
                1.0);
  const PathEnsemble e(TimeGrid(1.0, 5), 2, 10, 1);
  EXPECT_THROW(kernel_densities(m, {CoefficientProcess::parse("const:[0.1,0.3]", 2, 1)}, e), ConfigError);
}
