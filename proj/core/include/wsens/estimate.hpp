#pragma once

#include "wsens/types.hpp"

#include <cstdint>
#include <string>

namespace wsens {

/// Compensated (Neumaier) sum in index order; the result does not depend on
/// how the samples were produced.
double stable_sum(const Eigen::Ref<const Eigen::VectorXd>& x);
double stable_mean(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Monte Carlo estimate with its per-path influence values. The influence
/// vector has the estimate as its mean and carries enough information to
/// compute standard errors of differences under common random numbers.
struct ValueEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  std::string estimator;
  Eigen::VectorXd influence;
};

/// Sample mean and standard error (sample sd / sqrt(M)) of per-path values.
ValueEstimate make_estimate(Eigen::VectorXd samples, std::uint64_t seed, std::string estimator);

/// Estimate whose mean is fixed externally (e.g. a smooth function of sample
/// means) with linearized influence values around it.
ValueEstimate make_linearized(double value, Eigen::VectorXd influence, std::uint64_t seed,
                              std::string estimator);

/// Standard error of (a - b) when both were computed on the same paths.
double paired_std_error(const ValueEstimate& a, const ValueEstimate& b);

/// alpha * a + beta * b, path by path.
ValueEstimate combine(const ValueEstimate& a, double alpha, const ValueEstimate& b, double beta,
                      std::string estimator);

}  // namespace wsens
