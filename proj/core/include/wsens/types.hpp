#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wsens {

/// Largest asset or factor count supported by the node-level linear algebra.
/// Small matrices carry inline storage of this size so per-node work never
/// touches the heap.
inline constexpr int kMaxDim = 8;

using SmallMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Rows are grid nodes, columns are coordinates.
using NodeMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One scalar per sampled path, indexed like the ensemble.
using PathFunctional = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed specs, inconsistent shapes, out-of-range parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Arguments outside a function's mathematical domain (e.g. U(x) for x < 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A computation that cannot be completed numerically. When the failure is
/// tied to a grid node, `path` and `node` locate it (npos otherwise).
class NumericalError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit NumericalError(const std::string& what, std::size_t path = npos,
                          std::size_t node = npos)
      : Error(what), path_(path), node_(node) {}

  std::size_t path() const noexcept { return path_; }
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t path_;
  std::size_t node_;
};

/// Perturbed volatility leaves the kernel of the base volatility.
class KernelStabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace wsens
