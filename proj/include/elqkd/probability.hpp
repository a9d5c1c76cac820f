#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace elqkd {

/// A dimensionless probability. Construction rejects anything outside
/// [0, 1], including NaN.
class Probability {
 public:
  constexpr Probability() noexcept = default;
  constexpr explicit Probability(double value) : value_(checked(value)) {}

  constexpr double value() const noexcept { return value_; }

  friend constexpr auto operator<=>(Probability, Probability) = default;

 private:
  [[noreturn]] static void reject(double value) {
    throw std::domain_error("probability " + std::to_string(value) +
                            " is outside [0, 1]");
  }

  static constexpr double checked(double value) {
    if (!(value >= 0.0 && value <= 1.0)) reject(value);
    return value;
  }

  double value_ = 0.0;
};

/// Random-assignment error rate e_0. Bits assigned by a fair coin are wrong
/// half of the time.
inline constexpr double kRandomAssignmentErrorValue = 0.5;

inline constexpr Probability kRandomAssignmentError{kRandomAssignmentErrorValue};

}  // namespace elqkd
