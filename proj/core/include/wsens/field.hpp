#pragma once

#include "wsens/coefficient.hpp"
#include "wsens/grid.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wsens {

/// A vector-valued process computed from a list of coefficient processes.
///
/// The value depends on (t, W_t) only through the regimes of the sources, so
/// it is tabulated once per joint regime. Regimes where the builder fails
/// (e.g. a singular volatility) are stored as invalid and only raise an error
/// if a path actually visits them.
class VectorField {
 public:
  using Builder = std::function<std::optional<SmallVector>(std::span<const SmallMatrix* const>)>;
  using Combiner =
      std::function<std::optional<SmallVector>(const SmallVector&, const SmallVector&)>;

  /// Largest joint regime count a field may tabulate.
  static constexpr long kMaxRegimes = 1L << 16;

  VectorField(std::vector<CoefficientProcess> sources, int width, const Builder& build,
              std::string failure = "singular coefficients");

  static VectorField constant(const SmallVector& value);
  static VectorField zero(int width) { return constant(SmallVector::Zero(width)); }
  /// Wraps a column-vector coefficient process.
  static VectorField from_process(const CoefficientProcess& p);
  /// Pointwise combination of two fields over the union of their sources.
  static VectorField combine(const VectorField& a, const VectorField& b, int width,
                             const Combiner& fn, std::string failure = "singular coefficients");
  static VectorField affine(const VectorField& a, double alpha, const VectorField& b, double beta);

  int width() const noexcept { return width_; }
  int regimes() const noexcept { return static_cast<int>(valid_.size()); }
  bool deterministic() const noexcept;
  int regime(double t, const double* w) const noexcept;
  bool valid(int r) const { return valid_[static_cast<std::size_t>(r)] != 0; }
  const SmallVector& value(int r) const { return table_[static_cast<std::size_t>(r)]; }
  bool all_valid() const noexcept;
  bool is_zero() const noexcept;
  const std::vector<CoefficientProcess>& sources() const noexcept { return sources_; }

  /// Left-point values at nodes 0..N-1 of one path. `levels` is (N+1) x n.
  /// Throws NumericalError located at (path, node) on an invalid regime.
  void fill(const TimeGrid& grid, const NodeMatrix& levels, NodeMatrix& out,
            std::size_t path = NumericalError::npos) const;

  /// Exact integral over [0, horizon] of f(value(t)) for a deterministic field.
  double integrate(double horizon, const std::function<double(const SmallVector&)>& f) const;

 private:
  VectorField() = default;

  std::vector<CoefficientProcess> sources_;
  std::vector<int> strides_;
  std::vector<SmallVector> table_;
  std::vector<char> valid_;
  int width_ = 0;
  std::string failure_;
};

}  // namespace wsens
