#pragma once

#include "wsens/field.hpp"
#include "wsens/grid.hpp"
#include "wsens/types.hpp"

#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <thread>
#include <vector>

namespace wsens {

/// One sampled Brownian path: increments over each step and cumulative levels.
struct Path {
  std::size_t index = 0;
  NodeMatrix increments;  // N x n
  NodeMatrix levels;      // (N+1) x n, levels.row(0) = 0
};

/// Worker count from WSENS_WORKERS, falling back to the hardware concurrency.
int default_workers();

/// A seeded ensemble of Brownian paths on a time grid.
///
/// Paths are regenerated on demand from (seed, index), so an ensemble of any
/// size costs no memory unless materialized. Everything computed through
/// map() is bit-identical for every worker count.
class PathEnsemble {
 public:
  PathEnsemble(TimeGrid grid, int dim, std::size_t count, std::uint64_t seed);

  const TimeGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return count_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_scheme() const noexcept;

  /// Writes path i into `out`, reusing its storage.
  void generate(std::size_t i, Path& out) const;
  Path path(std::size_t i) const;

  /// Keeps all increments in memory. Returns *this for chaining.
  PathEnsemble& materialize();
  bool materialized() const noexcept { return static_cast<bool>(stored_); }

  PathEnsemble with_workers(int workers) const;
  int workers() const noexcept { return workers_; }

  /// Evaluates fn(path, row) for every path, where row points at `width`
  /// doubles of the result. Row i of the result belongs to path i.
  Eigen::MatrixXd map(int width, const std::function<void(const Path&, double*)>& fn) const;
  /// Single-column convenience over map().
  Eigen::VectorXd map_scalar(const std::function<double(const Path&)>& fn) const;

  /// Binary dump: little-endian u64 header (magic, version, seed, M, N, n,
  /// bits of T) followed by the row-major f64 increments of every path.
  void write_binary(std::ostream& os) const;
  static PathEnsemble read_binary(std::istream& is);

 private:
  TimeGrid grid_;
  int dim_;
  std::size_t count_;
  std::uint64_t seed_;
  int workers_;
  std::shared_ptr<const std::vector<double>> stored_;
};

PathEnsemble simulate(const TimeGrid& grid, int dim, std::size_t count, std::uint64_t seed);

// Pathwise quadrature. Integrands hold left-point values at nodes 0..N-1.

/// sum_k <H_k, dW_k>
double ito_integral(const NodeMatrix& integrand, const Path& path);
/// sum_k f_k dt for a single-column integrand, or sum_k |H_k|^2 dt with `squared`.
double time_integral(const NodeMatrix& integrand, double dt, bool squared = false);
/// log of the Doleans-Dade exponential of int Gamma dW.
double log_stochastic_exponential(const NodeMatrix& gamma, const Path& path, double dt);
/// W_k - sum_{j<k} drift_j dt, as an (N+1) x n level matrix.
NodeMatrix shifted_brownian(const Path& path, const NodeMatrix& drift, double dt);

// Ensemble-level versions over adapted integrands.
PathFunctional ito_integral(const VectorField& integrand, const PathEnsemble& ensemble);
/// int h dt for a width-1 field.
PathFunctional time_integral(const VectorField& integrand, const PathEnsemble& ensemble);
PathFunctional stochastic_exponential(const VectorField& gamma, const PathEnsemble& ensemble);
/// E(int (lambda_new - lambda_base)^T dW)_T per path.
PathFunctional girsanov_weight(const VectorField& lambda_new, const VectorField& lambda_base,
                               const PathEnsemble& ensemble);

}  // namespace wsens
