#pragma once

// Reference computations written independently of the library internals.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// lambda = sigma^T (sigma sigma^T)^{-1} (mu - r) through a plain LU solve.
inline Eigen::VectorXd price_of_risk(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu, double r) {
  const Eigen::MatrixXd gram = sigma * sigma.transpose();
  const Eigen::VectorXd excess = mu.array() - r;
  return sigma.transpose() * gram.partialPivLu().solve(excess);
}

// Power utility U(x) = p x^{1/p}: V(y) = (p - 1) y^{1 - q}.
inline double power_conjugate(double p, double y) {
  const double q = p / (p - 1.0);
  return (p - 1.0) * std::pow(y, 1.0 - q);
}

// Brute-force sup_x [U(x) - x y] on a log grid.
template <class U>
double brute_conjugate(const U& u, double y) {
  double best = -INFINITY;
  for (double lx = -12.0; lx <= 12.0; lx += 1e-4) {
    const double x = std::exp(lx);
    best = std::max(best, u(x) - x * y);
  }
  return best;
}

// Optimal value with deterministic lambda: p x0^{1/p} exp((q - 1)/2 |lambda|^2 T).
inline double power_value(double p, double x0, double lambda_sq, double horizon) {
  const double q = p / (p - 1.0);
  return p * std::pow(x0, 1.0 / p) * std::exp(0.5 * (q - 1.0) * lambda_sq * horizon);
}

// Example 1 weak target: T/2 - T^{3/2} / (3 sqrt(2 pi)).
inline double example1_weak(double horizon) {
  return 0.5 * horizon - std::pow(horizon, 1.5) / (3.0 * std::sqrt(2.0 * std::numbers::pi));
}

struct Support {
  double value;
  std::vector<int> argmax;
};

// Enumeration over all points, ties judged with the same relative rule.
inline Support support(const Eigen::VectorXd& d, const Eigen::MatrixXd& cloud, double tol) {
  Support s{-INFINITY, {}};
  for (int i = 0; i < cloud.rows(); ++i) s.value = std::max(s.value, cloud.row(i).dot(d));
  for (int i = 0; i < cloud.rows(); ++i)
    if (cloud.row(i).dot(d) >= s.value - tol * (1.0 + std::abs(s.value))) s.argmax.push_back(i);
  return s;
}

inline double danskin_derivative(const Eigen::VectorXd& d, const Eigen::VectorXd& delta, const Eigen::MatrixXd& cloud,
                                  double tol) {
  double best = -INFINITY;
  for (int i : support(d, cloud, tol).argmax) best = std::max(best, cloud.row(i).dot(delta));
  return best;
}

// Integer-valued point clouds make exact ties common.
inline Eigen::MatrixXd integer_cloud(std::mt19937_64& rng, int points, int dim) {
  std::uniform_int_distribution<int> pick(-2, 2);
  Eigen::MatrixXd c(points, dim);
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < dim; ++j) c(i, j) = pick(rng);
  return c;
}

}  // namespace oracle
