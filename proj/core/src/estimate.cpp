#include "wsens/estimate.hpp"

#include <cmath>

namespace wsens {

double stable_sum(const Eigen::Ref<const Eigen::VectorXd>& x) {
  double sum = 0.0;
  double comp = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x[i];
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double stable_mean(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() == 0) throw NumericalError("mean of an empty sample");
  return stable_sum(x) / static_cast<double>(x.size());
}

namespace {

double standard_error(const Eigen::VectorXd& x, double centre) {
  const auto m = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  const Eigen::VectorXd dev = (x.array() - centre).square().matrix();
  return std::sqrt(stable_sum(dev) / (m - 1.0) / m);
}

}  // namespace

ValueEstimate make_estimate(Eigen::VectorXd samples, std::uint64_t seed, std::string estimator) {
  if (!samples.allFinite()) throw NumericalError(estimator + ": non-finite path value");
  ValueEstimate e;
  e.mean = stable_mean(samples);
  e.std_error = standard_error(samples, e.mean);
  e.paths = static_cast<std::size_t>(samples.size());
  e.seed = seed;
  e.estimator = std::move(estimator);
  e.influence = std::move(samples);
  return e;
}

ValueEstimate make_linearized(double value, Eigen::VectorXd influence, std::uint64_t seed,
                              std::string estimator) {
  if (!influence.allFinite() || !std::isfinite(value))
    throw NumericalError(estimator + ": non-finite path value");
  ValueEstimate e;
  e.mean = value;
  e.std_error = standard_error(influence, stable_mean(influence));
  e.paths = static_cast<std::size_t>(influence.size());
  e.seed = seed;
  e.estimator = std::move(estimator);
  e.influence = std::move(influence);
  return e;
}

double paired_std_error(const ValueEstimate& a, const ValueEstimate& b) {
  if (a.influence.size() != b.influence.size())
    throw ConfigError("paired standard error: estimates use different path counts");
  const Eigen::VectorXd d = a.influence - b.influence;
  return standard_error(d, stable_mean(d));
}

ValueEstimate combine(const ValueEstimate& a, double alpha, const ValueEstimate& b, double beta,
                      std::string estimator) {
  if (a.influence.size() != b.influence.size())
    throw ConfigError("combine: estimates use different path counts");
  return make_linearized(alpha * a.mean + beta * b.mean, alpha * a.influence + beta * b.influence,
                         a.seed, std::move(estimator));
}

}  // namespace wsens
