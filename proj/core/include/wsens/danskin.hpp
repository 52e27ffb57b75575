#pragma once

#include <Eigen/Dense>

#include <vector>

namespace wsens {

/// Finite point cloud standing in for a compact convex set (its hull). One
/// point per row.
using PointCloud = Eigen::MatrixXd;

inline constexpr double kDefaultTieTol = 1e-12;

struct SupportResult {
  double value = 0.0;             // v(d) = max_z <d, z>
  std::vector<int> argmax;        // indices within tie_tol (1 + |v|) of the max
  double radius = 0.0;            // max_z |z|
};

SupportResult support_value(const Eigen::VectorXd& d, const PointCloud& cloud, double tie_tol = kDefaultTieTol);

/// max over the argmax set S(d) of <delta, z>.
double directional_derivative(const Eigen::VectorXd& d, const Eigen::VectorXd& delta, const PointCloud& cloud,
                              double tie_tol = kDefaultTieTol);

struct HadamardReport {
  double derivative = 0.0;
  std::vector<double> quotients;  // (v(d + t_k h_k) - v(d)) / t_k
  std::vector<double> errors;     // |quotient - derivative|
  bool converged = false;         // errors shrink to within `tol` by the end
};

/// Difference quotients along t_k -> 0 with directions h_k -> delta.
HadamardReport hadamard_probe(const Eigen::VectorXd& d, const Eigen::VectorXd& delta,
                              const std::vector<double>& steps, const std::vector<Eigen::VectorXd>& directions,
                              const PointCloud& cloud, double tol = 1e-9);

struct LipschitzReport {
  double difference = 0.0;  // |v(d1) - v(d2)|
  double bound = 0.0;       // |d1 - d2| max |z|
  bool holds = false;
};

LipschitzReport lipschitz_check(const Eigen::VectorXd& d1, const Eigen::VectorXd& d2, const PointCloud& cloud);

}  // namespace wsens
