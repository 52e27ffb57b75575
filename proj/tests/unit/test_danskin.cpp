#include <wsens/wsens.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace wsens;

namespace {

Eigen::VectorXd integer_vector(std::mt19937_64& rng, int dim) {
  std::uniform_int_distribution<int> pick(-2, 2);
  Eigen::VectorXd v(dim);
  for (auto& x : v) x = pick(rng);
  return v;
}

}  // namespace

TEST(Danskin, SupportMatchesEnumeration) {
  std::mt19937_64 rng(2024);
  int ties = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + trial % 5;
    const int points = 1 + static_cast<int>(rng() % 20);
    const Eigen::MatrixXd cloud = oracle::integer_cloud(rng, points, dim);
    const Eigen::VectorXd d = integer_vector(rng, dim);
    const Eigen::VectorXd delta = integer_vector(rng, dim);
    const auto s = support_value(d, cloud);
    const auto ref = oracle::support(d, cloud, kDefaultTieTol);
    EXPECT_EQ(s.value, ref.value);
    EXPECT_EQ(s.argmax, ref.argmax);
    EXPECT_EQ(directional_derivative(d, delta, cloud), oracle::danskin_derivative(d, delta, cloud, kDefaultTieTol));
    ties += ref.argmax.size() > 1;
  }
  EXPECT_GT(ties, 10);  // the tie branch was exercised
}

TEST(Danskin, DerivativeMatchesOneSidedQuotient) {
  // v is piecewise linear, so for small t the quotient is exact.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + trial % 5;
    const Eigen::MatrixXd cloud = oracle::integer_cloud(rng, 1 + trial % 20, dim);
    const Eigen::VectorXd d = integer_vector(rng, dim);
    const Eigen::VectorXd delta = integer_vector(rng, dim);
    const double t = 1e-6;
    const double quotient = (support_value(d + t * delta, cloud).value - support_value(d, cloud).value) / t;
    EXPECT_NEAR(quotient, directional_derivative(d, delta, cloud), 1e-8);
  }
}

TEST(Danskin, HadamardLimitIndependentOfApproach) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  const std::vector<double> steps{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + trial % 4;
    const Eigen::MatrixXd cloud = oracle::integer_cloud(rng, 3 + trial % 15, dim);
    const Eigen::VectorXd d = integer_vector(rng, dim);
    const Eigen::VectorXd delta = integer_vector(rng, dim);
    const double exact = directional_derivative(d, delta, cloud);
    double last[2];
    for (int seq = 0; seq < 2; ++seq) {
      Eigen::VectorXd u(dim);
      for (auto& x : u) x = n01(rng);
      std::vector<Eigen::VectorXd> dirs;
      for (double t : steps) dirs.push_back(delta + (seq ? -1.0 : 1.0) * t * u);
      const auto r = hadamard_probe(d, delta, steps, dirs, cloud, 1e-4);
      EXPECT_EQ(r.derivative, exact);
      EXPECT_TRUE(r.converged) << "trial " << trial << " sequence " << seq;
      last[seq] = r.quotients.back();
    }
    EXPECT_NEAR(last[0], last[1], 1e-4);
  }
}

TEST(Danskin, LipschitzInDirection) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + trial % 5;
    const Eigen::MatrixXd cloud = oracle::integer_cloud(rng, 1 + trial % 20, dim);
    Eigen::VectorXd d1(dim), d2(dim);
    for (int i = 0; i < dim; ++i) {
      d1[i] = n01(rng);
      d2[i] = n01(rng);
    }
    const auto r = lipschitz_check(d1, d2, cloud);
    EXPECT_TRUE(r.holds);
    EXPECT_LE(r.difference, r.bound + 1e-12);
  }
}

TEST(Danskin, RejectsShapeMismatch) {
  const Eigen::MatrixXd cloud = Eigen::MatrixXd::Ones(3, 2);
  EXPECT_THROW(support_value(Eigen::VectorXd::Ones(3), cloud), ConfigError);
  EXPECT_THROW(support_value(Eigen::VectorXd::Ones(2), Eigen::MatrixXd(0, 2)), ConfigError);
}
