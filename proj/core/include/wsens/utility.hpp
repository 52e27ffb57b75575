#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wsens {

/// Declared growth bound U(x) <= C x^{1/p}.
struct GrowthBound {
  double constant = 1.0;
  double exponent = 2.0;
};

/// A utility function with derivative, inverse and Fenchel conjugate.
///
/// Power utilities are U(x) = p x^{1/p} with p > 1 (q = p / (p - 1) is the
/// conjugate exponent); `sqrt` is the p = 2 case. Custom utilities come from
/// a monotone table of (x, U(x)) interpolated monotonically in log-log scale.
class Utility {
 public:
  enum class Kind { power, log, custom };

  static Utility power(double p);
  static Utility log();
  static Utility sqrt() { return power(2.0); }
  /// xs strictly increasing and positive, us strictly increasing and positive.
  static Utility from_table(std::vector<double> xs, std::vector<double> us,
                            std::optional<GrowthBound> growth = std::nullopt);
  /// `power:p=3` | `log` | `sqrt` | `custom:file=<path>[;C=..;p=..]`.
  static Utility parse(std::string_view text);
  std::string to_string() const { return spec_; }

  Kind kind() const noexcept { return kind_; }
  bool is_power() const noexcept { return kind_ == Kind::power; }
  /// p and q of a power utility (p is the growth exponent for custom kinds).
  double p() const noexcept { return p_; }
  double q() const noexcept { return p_ / (p_ - 1.0); }
  const std::optional<GrowthBound>& growth() const noexcept { return growth_; }

  double value(double x) const;
  double derivative(double x) const;
  /// U^{-1}(y).
  double inverse(double y) const;
  /// (U')^{-1}(v).
  double marginal_inverse(double v) const;
  /// V(y) = sup_x [U(x) - x y].
  double conjugate(double y) const;

 private:
  struct Table;

  Utility() = default;

  Kind kind_ = Kind::power;
  double p_ = 2.0;
  std::optional<GrowthBound> growth_;
  std::shared_ptr<const Table> table_;
  std::string spec_;
};

struct HypothesisReport {
  bool increasing = false;
  bool concave = false;
  bool inada = false;
  bool zero_at_origin = false;
  bool growth = false;
  bool inverse_consistent = false;
  std::vector<std::string> notes;

  /// Eligible for the weak sensitivity formulas (power-type growth, U(0+) = 0).
  bool in_scope() const noexcept {
    return increasing && concave && inada && zero_at_origin && growth && inverse_consistent;
  }
};

/// Probe-grid checks of monotonicity, concavity, the INADA limits, U(0+) = 0,
/// the declared growth bound and U^{-1}(U(x)) = x.
HypothesisReport check_hypotheses(const Utility& u);

}  // namespace wsens
