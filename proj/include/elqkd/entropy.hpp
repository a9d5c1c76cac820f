#pragma once

#include "elqkd/probability.hpp"

namespace elqkd {

/// Binary Shannon entropy H2(x) = -x log2 x - (1-x) log2(1-x), in bits.
///
/// The endpoints are handled by an explicit branch so that H2(0) = H2(1) = 0
/// without evaluating 0 * log 0. Throws std::domain_error for x outside
/// [0, 1].
double binary_entropy(double x);

inline double binary_entropy(Probability p) { return binary_entropy(p.value()); }

}  // namespace elqkd
