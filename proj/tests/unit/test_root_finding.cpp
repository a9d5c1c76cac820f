#include <doctest.h>

#include <cmath>

#include "elqkd/root_finding.hpp"

using elqkd::find_root_bisect;

TEST_CASE("bisection finds analytically known roots") {
  constexpr double tol = 1e-9;
  CHECK(std::abs(find_root_bisect([](double x) { return x - 0.5; }, 0.0, 1.0, tol) - 0.5) <= tol);
  CHECK(std::abs(find_root_bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, tol) -
                 1.41421356237309504880) <= tol);
  CHECK(find_root_bisect([](double x) { return x; }, -1.0, 1.0, tol) == 0.0);
}

TEST_CASE("bisection handles decreasing functions and swapped brackets") {
  const auto f = [](double x) { return 0.3 - x; };
  CHECK(std::abs(find_root_bisect(f, 1.0, 0.0) - 0.3) <= 1e-9);
}

TEST_CASE("bisection returns an endpoint root directly") {
  int calls = 0;
  const auto f = [&](double x) {
    ++calls;
    return x - 1.0;
  };
  CHECK(find_root_bisect(f, 0.0, 1.0) == 1.0);
  CHECK(calls == 2);
}

TEST_CASE("bisection error paths") {
  CHECK_THROWS_AS(find_root_bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                  elqkd::NoSignChange);
  CHECK_THROWS_AS(find_root_bisect([](double x) { return x; }, -1.0, 1.0, 0.0),
                  std::invalid_argument);
  // A tolerance below the spacing of doubles near the root can never be met.
  CHECK_THROWS_AS(find_root_bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-300),
                  elqkd::RootNotConverged);
}

TEST_CASE("bisection meets tolerance for a family of shifted roots") {
  for (int k = 1; k < 100; ++k) {
    const double root = k / 100.0 + 1.0 / 7.0 / 100.0;
    for (double tol : {1e-3, 1e-6, 1e-9, 1e-12}) {
      const double got = find_root_bisect([&](double x) { return std::tanh(x - root); }, 0.0,
                                          1.5, tol);
      CHECK(std::abs(got - root) <= tol);
    }
  }
}
