#pragma once

#include "wsens/types.hpp"

namespace wsens {

/// Uniform grid t_k = k T / N on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0)) throw ConfigError("time grid: horizon must be positive");
    if (steps < 1) throw ConfigError("time grid: need at least one step");
  }

  double horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return steps_; }
  double dt() const noexcept { return horizon_ / steps_; }
  double time(int k) const noexcept { return k == steps_ ? horizon_ : horizon_ * k / steps_; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  int steps_;
};

}  // namespace wsens
