#include <wsens/wsens.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"

using namespace wsens;

TEST(Utility, PowerClosedForms) {
  for (double p : {1.5, 2.0, 3.0}) {
    const Utility u = Utility::power(p);
    const double q = p / (p - 1.0);
    EXPECT_DOUBLE_EQ(u.q(), q);
    for (double x : {1e-6, 0.3, 1.0, 7.5, 1e5}) {
      EXPECT_NEAR(u.value(x), p * std::pow(x, 1.0 / p), 1e-12 * u.value(x));
      EXPECT_NEAR(u.derivative(x), std::pow(x, 1.0 / p - 1.0), 1e-12 * u.derivative(x));
      EXPECT_NEAR(u.inverse(u.value(x)), x, 1e-12 * x);
      EXPECT_NEAR(u.marginal_inverse(u.derivative(x)), x, 1e-11 * x);
    }
    for (double y : {0.1, 1.0, 4.0})
      EXPECT_NEAR(u.conjugate(y), oracle::power_conjugate(p, y), 1e-12 * (1.0 + oracle::power_conjugate(p, y)));
  }
}

TEST(Utility, ConjugateMatchesBruteForceSupremum) {
  const Utility u = Utility::power(3.0);
  const Utility l = Utility::log();
  for (double y : {0.2, 1.0, 3.0}) {
    EXPECT_NEAR(u.conjugate(y), oracle::brute_conjugate([&](double x) { return u.value(x); }, y), 1e-6);
    EXPECT_NEAR(l.conjugate(y), oracle::brute_conjugate([](double x) { return std::log(x); }, y), 1e-6);
  }
}

TEST(Utility, LogClosedForms) {
  const Utility u = Utility::log();
  EXPECT_EQ(u.kind(), Utility::Kind::log);
  EXPECT_NEAR(u.value(std::exp(2.0)), 2.0, 1e-15);
  EXPECT_NEAR(u.inverse(2.0), std::exp(2.0), 1e-12);
  EXPECT_NEAR(u.marginal_inverse(4.0), 0.25, 1e-15);
  EXPECT_NEAR(u.conjugate(2.0), -std::log(2.0) - 1.0, 1e-15);
}

TEST(Utility, DomainErrors) {
  EXPECT_THROW(Utility::power(2.0).value(-1.0), DomainError);
  EXPECT_THROW(Utility::log().value(-1.0), DomainError);
  EXPECT_EQ(Utility::log().value(0.0), -INFINITY);
  EXPECT_THROW(Utility::power(2.0).marginal_inverse(0.0), DomainError);
}

TEST(Utility, ParseSpecs) {
  EXPECT_DOUBLE_EQ(Utility::parse("power:p=3").p(), 3.0);
  EXPECT_DOUBLE_EQ(Utility::parse("sqrt").p(), 2.0);
  EXPECT_EQ(Utility::parse("log").kind(), Utility::Kind::log);
  EXPECT_THROW(Utility::parse("power"), ConfigError);
  EXPECT_THROW(Utility::parse("power:p=1"), ConfigError);
  EXPECT_THROW(Utility::parse("power:p=abc"), ConfigError);
  EXPECT_THROW(Utility::parse("exp"), ConfigError);
  EXPECT_THROW(Utility::parse("custom:file=/nonexistent/table.csv"), ConfigError);
}

TEST(Utility, HypothesisChecks) {
  EXPECT_TRUE(check_hypotheses(Utility::power(2.0)).in_scope());
  EXPECT_TRUE(check_hypotheses(Utility::power(4.0)).in_scope());
  const auto log = check_hypotheses(Utility::log());
  EXPECT_TRUE(log.increasing);
  EXPECT_TRUE(log.concave);
  EXPECT_TRUE(log.inada);
  EXPECT_FALSE(log.zero_at_origin);
  EXPECT_FALSE(log.in_scope());
  EXPECT_FALSE(log.notes.empty());
}

namespace {

Utility tabulated_sqrt(std::optional<GrowthBound> growth = GrowthBound{2.0, 2.0}) {
  std::vector<double> xs, us;
  for (double lx = -10.0; lx <= 10.0; lx += 0.05) {
    xs.push_back(std::pow(10.0, lx));
    us.push_back(2.0 * std::sqrt(xs.back()));
  }
  return Utility::from_table(xs, us, growth);
}

}  // namespace

TEST(Utility, TableReproducesPowerUtility) {
  const Utility t = tabulated_sqrt();
  const Utility u = Utility::sqrt();
  for (double x : {1e-12, 1e-7, 0.013, 0.5, 1.0, 3.7, 1e4, 1e12}) {
    EXPECT_NEAR(t.value(x), u.value(x), 1e-9 * u.value(x)) << x;
    EXPECT_NEAR(t.derivative(x), u.derivative(x), 1e-6 * u.derivative(x)) << x;
    EXPECT_NEAR(t.inverse(u.value(x)), x, 1e-8 * x) << x;
    EXPECT_NEAR(t.marginal_inverse(u.derivative(x)), x, 1e-5 * x) << x;
  }
  EXPECT_NEAR(t.conjugate(0.7), u.conjugate(0.7), 1e-6);
  EXPECT_TRUE(check_hypotheses(t).in_scope());
}

TEST(Utility, TableValidation) {
  EXPECT_THROW(Utility::from_table({1, 2, 3, 4}, {1, 2, 2, 3}), ConfigError);
  EXPECT_THROW(Utility::from_table({1, 2}, {1, 2}), ConfigError);
  EXPECT_THROW(Utility::from_table({-1, 2, 3, 4}, {1, 2, 3, 4}), ConfigError);
}

TEST(Utility, TableFailingGrowthBoundIsOutOfScope) {
  // 2 sqrt(x) violates U(x) <= 1.5 x^{1/2}.
  EXPECT_FALSE(check_hypotheses(tabulated_sqrt(GrowthBound{1.5, 2.0})).growth);
}

TEST(Utility, TableFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "wsens_utility_table.csv";
  {
    std::ofstream os(path);
    os.precision(17);
    os << "x,u\n";
    for (double lx = -8.0; lx <= 8.0; lx += 0.1) os << std::pow(10.0, lx) << "," << 3.0 * std::cbrt(std::pow(10.0, lx)) << "\n";
  }
  const Utility t = Utility::parse("custom:file=" + path.string() + ";C=3;p=3");
  EXPECT_EQ(t.kind(), Utility::Kind::custom);
  EXPECT_NEAR(t.value(2.0), Utility::power(3.0).value(2.0), 1e-5);
  EXPECT_TRUE(check_hypotheses(t).in_scope());
  std::filesystem::remove(path);
}
