#pragma once

#include <cmath>
#include <compare>
#include <limits>

#include "bayesmix/error.hpp"

namespace bayesmix {

/// Natural logarithm of a nonnegative quantity; -infinity encodes zero.
///
/// Multiplication of the represented quantities is addition of logs, which
/// is what operator* does. There is deliberately no operator+: summing
/// quantities goes through log_sum_exp.
struct LogValue {
  double value = -std::numeric_limits<double>::infinity();

  static constexpr LogValue zero() noexcept {
    return LogValue{-std::numeric_limits<double>::infinity()};
  }
  static constexpr LogValue one() noexcept { return LogValue{0.0}; }

  static LogValue from_linear(double x) {
    if (!(x >= 0.0)) throw DomainError("LogValue::from_linear: negative or NaN argument");
    return LogValue{std::log(x)};
  }

  double linear() const noexcept { return std::exp(value); }
  bool is_zero() const noexcept { return value == -std::numeric_limits<double>::infinity(); }

  friend LogValue operator*(LogValue lhs, LogValue rhs) noexcept {
    if (lhs.is_zero() || rhs.is_zero()) return zero();
    return LogValue{lhs.value + rhs.value};
  }

  friend auto operator<=>(const LogValue&, const LogValue&) = default;
};

}  // namespace bayesmix
