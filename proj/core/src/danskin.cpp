#include "wsens/danskin.hpp"

#include "wsens/types.hpp"

#include <cmath>
#include <limits>

namespace wsens {

namespace {

void require_cloud(const Eigen::VectorXd& d, const PointCloud& cloud) {
  if (cloud.rows() == 0) throw ConfigError("support function: empty point cloud");
  if (cloud.cols() != d.size()) throw ConfigError("support function: dimension mismatch");
  if (!cloud.allFinite() || !d.allFinite()) throw ConfigError("support function: non-finite input");
}

}  // namespace

SupportResult support_value(const Eigen::VectorXd& d, const PointCloud& cloud, double tie_tol) {
  require_cloud(d, cloud);
  const Eigen::VectorXd scores = cloud * d;
  SupportResult r;
  r.value = scores.maxCoeff();
  const double tol = tie_tol * (1.0 + std::abs(r.value));
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    if (scores[i] >= r.value - tol) r.argmax.push_back(static_cast<int>(i));
  r.radius = cloud.rowwise().norm().maxCoeff();
  return r;
}

double directional_derivative(const Eigen::VectorXd& d, const Eigen::VectorXd& delta, const PointCloud& cloud,
                              double tie_tol) {
  if (delta.size() != d.size()) throw ConfigError("support function: direction dimension mismatch");
  const SupportResult s = support_value(d, cloud, tie_tol);
  double best = -std::numeric_limits<double>::infinity();
  for (int i : s.argmax) best = std::max(best, cloud.row(i).dot(delta));
  return best;
}

HadamardReport hadamard_probe(const Eigen::VectorXd& d, const Eigen::VectorXd& delta, const std::vector<double>& steps,
                              const std::vector<Eigen::VectorXd>& directions, const PointCloud& cloud, double tol) {
  if (steps.size() != directions.size() || steps.empty())
    throw ConfigError("hadamard probe: need one direction per step");
  HadamardReport r;
  r.derivative = directional_derivative(d, delta, cloud);
  const double base = support_value(d, cloud).value;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!(steps[k] > 0.0)) throw ConfigError("hadamard probe: steps must be positive");
    const double q = (support_value(d + steps[k] * directions[k], cloud).value - base) / steps[k];
    r.quotients.push_back(q);
    r.errors.push_back(std::abs(q - r.derivative));
  }
  r.converged = r.errors.back() <= tol;
  return r;
}

LipschitzReport lipschitz_check(const Eigen::VectorXd& d1, const Eigen::VectorXd& d2, const PointCloud& cloud) {
  const SupportResult a = support_value(d1, cloud);
  const SupportResult b = support_value(d2, cloud);
  LipschitzReport r;
  r.difference = std::abs(a.value - b.value);
  r.bound = (d1 - d2).norm() * a.radius;
  // Allow for rounding in the two inner products.
  r.holds = r.difference <= r.bound * (1.0 + 1e-12) + 1e-14 * (1.0 + std::abs(a.value) + std::abs(b.value));
  return r;
}

}  // namespace wsens
