#pragma once

#include "wsens/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace wsens {

/// A bounded coefficient process that is a function of (t, W_t).
///
/// Three kinds are supported: constant, piecewise constant in time, and an
/// indicator of one Brownian coordinate crossing a threshold. Each kind takes
/// finitely many values, indexed by a "regime", which lets derived quantities
/// be tabulated once instead of recomputed at every node.
class CoefficientProcess {
 public:
  enum class Kind { constant, piecewise, indicator };

  static CoefficientProcess constant(SmallMatrix value);
  static CoefficientProcess constant(double value);
  static CoefficientProcess zero(int rows, int cols);
  /// values[i] holds on [breakpoints[i-1], breakpoints[i]); values has one
  /// more entry than breakpoints.
  static CoefficientProcess piecewise(std::vector<double> breakpoints,
                                      std::vector<SmallMatrix> values);
  /// `high` where W^driver_t < threshold, `low` otherwise. driver is 0-based.
  static CoefficientProcess indicator(int driver, double threshold, SmallMatrix low,
                                      SmallMatrix high);

  /// Parses `const:[..]`, `pw:t=[..];v=[..]` or `ind:j=<1-based>;c=..;lo=[..];hi=[..]`.
  /// Matrix entries are row-major.
  static CoefficientProcess parse(std::string_view text, int rows, int cols);
  std::string to_string() const;

  Kind kind() const noexcept { return kind_; }
  int rows() const noexcept { return static_cast<int>(values_.front().rows()); }
  int cols() const noexcept { return static_cast<int>(values_.front().cols()); }
  bool deterministic() const noexcept { return kind_ != Kind::indicator; }
  bool is_zero() const noexcept;
  /// Largest absolute entry over all regimes.
  double bound() const noexcept;

  int regimes() const noexcept { return static_cast<int>(values_.size()); }
  /// Regime in force at time t given the current Brownian level w (length n).
  int regime(double t, const double* w) const noexcept;
  const SmallMatrix& value(int regime) const { return values_[static_cast<std::size_t>(regime)]; }
  const SmallMatrix& evaluate(double t, const double* w) const { return value(regime(t, w)); }

  int driver() const noexcept { return driver_; }
  double threshold() const noexcept { return threshold_; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }

  /// Throws ConfigError unless the shape is rows x cols and the driver index
  /// fits a Brownian motion of dimension n.
  void require_shape(int rows, int cols, int n, std::string_view name) const;

 private:
  CoefficientProcess() = default;

  Kind kind_ = Kind::constant;
  std::vector<SmallMatrix> values_;
  std::vector<double> breakpoints_;
  int driver_ = 0;
  double threshold_ = 0.0;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

}  // namespace wsens
