#include "elqkd/entropy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace elqkd {

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("binary_entropy: argument " + std::to_string(x) +
                            " is outside [0, 1]");
  }
  if (x <= 0.0 || x >= 1.0) return 0.0;
  // log1p keeps the (1-x) term accurate for small x.
  const double nats = -x * std::log(x) - (1.0 - x) * std::log1p(-x);
  return nats / std::numbers::ln2;
}

}  // namespace elqkd
