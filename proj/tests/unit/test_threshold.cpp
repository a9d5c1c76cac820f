#include <doctest.h>

#include <cmath>

#include "elqkd/threshold.hpp"

using namespace elqkd;

namespace {

Probability P(double v) { return Probability{v}; }

double rate_at(const CurveFamily& family, double eta, double e_d) {
  return key_rate(model_at(family, P(eta), P(e_d))).rate;
}

// Independent oracle: walk e_d upward in fixed steps and report the last
// grid value whose rate is still nonnegative.
double scan_threshold(const CurveFamily& family, double eta, double step) {
  double last_ok = -1.0;
  for (int k = 0;; ++k) {
    const double e_d = k * step;
    if (e_d > 0.5) break;
    if (rate_at(family, eta, e_d) >= 0.0) {
      last_ok = e_d;
    } else {
      break;
    }
  }
  return last_ok;
}

const CurveFamily kSingle{CurveTag::single_photon};
const CurveFamily kCoherent{CurveTag::coherent, 0.5, Probability{0.01}};
const CurveFamily kMemory{CurveTag::coherent_memory, 0.5, Probability{0.01}};
const CurveFamily kMemorySingle{CurveTag::memory_single_photon};

}  // namespace

TEST_CASE("single-photon ceiling at full transmittance") {
  const auto e = solve_threshold_ed(kSingle, P(1.0), 1e-9);
  REQUIRE(e.has_value());
  // Root of 1 - 2 H2(x), 40-digit reference 0.11002786443835955.
  CHECK(std::abs(e->value() - 0.11002786443835955) <= 1e-9);
  CHECK(std::abs(e->value() - 0.110) <= 0.001);
}

TEST_CASE("no threshold at or below the transmittance floor") {
  for (const auto& family : {kSingle, kCoherent, kMemory, kMemorySingle}) {
    CHECK_FALSE(solve_threshold_ed(family, P(0.5)).has_value());
    CHECK_FALSE(solve_threshold_ed(family, P(0.4)).has_value());
    CHECK_FALSE(solve_threshold_ed(family, P(0.01)).has_value());
    CHECK(solve_threshold_ed(family, P(0.51)).has_value());
  }
  CHECK_THROWS_AS(solve_threshold_ed(kSingle, P(0.0)), std::invalid_argument);
  CHECK_THROWS_AS(solve_threshold_ed(kSingle, P(0.8), 0.0), std::invalid_argument);
}

TEST_CASE("every solved point brackets the sign change") {
  const double tol = 1e-9;
  for (const auto& family : {kSingle, kCoherent, kMemory, kMemorySingle}) {
    const auto curve = sweep_curve(family, GridSpec{}, tol);
    for (const auto& p : curve.points) {
      const double e = p.e_d_max.value();
      CHECK(rate_at(family, p.eta.value(), std::max(0.0, e - 2 * tol)) >= 0.0);
      CHECK(rate_at(family, p.eta.value(), std::min(0.5, e + 2 * tol)) < 0.0);
    }
  }
}

TEST_CASE("bisection agrees with a fine scan to one scan step") {
  const double step = 1e-5;
  for (const auto& family : {kSingle, kCoherent, kMemory}) {
    for (double eta : {0.52, 0.6, 0.75, 0.9, 1.0}) {
      const auto solved = solve_threshold_ed(family, P(eta));
      REQUIRE(solved.has_value());
      const double scanned = scan_threshold(family, eta, step);
      CHECK(scanned >= 0.0);
      CHECK(std::abs(solved->value() - scanned) <= step);
    }
  }
}

TEST_CASE("curve shapes") {
  const GridSpec grid;  // 0.50 .. 1.00 step 0.005
  const auto single = sweep_curve(kSingle, grid);
  const auto memory_single = sweep_curve(kMemorySingle, grid);
  const auto coherent = sweep_curve(kCoherent, grid);
  const auto memory = sweep_curve(kMemory, grid);

  for (const auto* curve : {&single, &memory_single, &coherent, &memory}) {
    REQUIRE_FALSE(curve->points.empty());
    CHECK(curve->points.front().eta.value() > 0.5);
    CHECK(curve->points.front().eta.value() <= 0.55);
    CHECK(curve->points.back().eta.value() == 1.0);
    for (std::size_t i = 1; i < curve->points.size(); ++i) {
      CHECK(curve->points[i].eta > curve->points[i - 1].eta);
    }
  }
  CHECK(coherent.points.back().e_d_max.value() > 0.0);
  CHECK(std::abs(single.points.back().e_d_max.value() - 0.110) <= 0.001);

  for (std::size_t i = 1; i < single.points.size(); ++i) {
    CHECK(single.points[i].e_d_max >= single.points[i - 1].e_d_max);
  }
  REQUIRE(single.points.size() == memory_single.points.size());
  for (std::size_t i = 0; i < single.points.size(); ++i) {
    CHECK(memory_single.points[i].eta == single.points[i].eta);
    CHECK(std::abs(memory_single.points[i].e_d_max.value() - single.points[i].e_d_max.value()) <=
          1e-6);
    CHECK(memory_single.points[i].tag == CurveTag::memory_single_photon);
  }
}

TEST_CASE("sweep is independent of the worker count") {
  const GridSpec grid{0.5, 1.0, 0.01};
  const auto serial = sweep_curve(kCoherent, grid, 1e-9, 1);
  const auto parallel = sweep_curve(kCoherent, grid, 1e-9, 4);
  REQUIRE(serial.points.size() == parallel.points.size());
  for (std::size_t i = 0; i < serial.points.size(); ++i) {
    CHECK(serial.points[i].eta == parallel.points[i].eta);
    CHECK(serial.points[i].e_d_max == parallel.points[i].e_d_max);
  }
}

TEST_CASE("grid construction") {
  const auto points = GridSpec{}.points();
  REQUIRE(points.size() == 101);
  CHECK(points.front() == 0.5);
  CHECK(points.back() == 1.0);
  CHECK(points[1] == 0.505);
  CHECK(GridSpec{0.3, 0.3, 0.1}.points().size() == 1);
  CHECK_THROWS_AS(GridSpec({0.0, 1.0, 0.1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec({0.5, 1.1, 0.1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec({0.6, 0.5, 0.1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec({0.5, 1.0, 0.0}).validate(), std::invalid_argument);
}

TEST_CASE("a grid below the floor yields an empty-curve error") {
  for (const auto& family : {kSingle, kCoherent, kMemory, kMemorySingle}) {
    CHECK_THROWS_AS(sweep_curve(family, GridSpec{0.1, 0.5, 0.05}), EmptyCurve);
  }
}

TEST_CASE("curve tag names round-trip") {
  for (auto tag : kAllCurveTags) CHECK(parse_curve_tag(curve_name(tag)) == tag);
  CHECK_FALSE(parse_curve_tag("all").has_value());
}
