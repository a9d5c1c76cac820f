#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "elqkd/probability.hpp"
#include "elqkd/rate_models.hpp"
#include "elqkd/root_finding.hpp"

namespace elqkd {

/// The four tolerable-region curves: three source models plus a
/// basis-independent source behind a quantum memory, where eta is the
/// readout probability eta_M.
enum class CurveTag { single_photon, coherent, coherent_memory, memory_single_photon };

inline constexpr CurveTag kAllCurveTags[] = {CurveTag::single_photon, CurveTag::coherent,
                                             CurveTag::coherent_memory,
                                             CurveTag::memory_single_photon};

std::string_view curve_name(CurveTag tag) noexcept;
std::optional<CurveTag> parse_curve_tag(std::string_view name) noexcept;

/// A curve family fixes everything except the swept transmittance and the
/// solved-for detection error.
struct CurveFamily {
  CurveTag tag = CurveTag::single_photon;
  double mu = 0.5;
  Probability eta_c{0.01};
};

/// The source model of `family` at transmittance (or readout probability)
/// `eta` and intrinsic error `e_d`.
SourceModel model_at(const CurveFamily& family, Probability eta, Probability e_d);

struct ThresholdPoint {
  Probability eta;
  Probability e_d_max;  ///< largest e_d with nonnegative key rate
  CurveTag tag = CurveTag::single_photon;
};

struct GridSpec {
  double eta_min = 0.5;
  double eta_max = 1.0;
  double step = 0.005;

  /// Throws std::invalid_argument unless 0 < eta_min <= eta_max <= 1 and step > 0.
  void validate() const;
  /// eta_min, eta_min + step, ... up to eta_max, computed from an integer
  /// index and rounded to 1e-12 so repeated sweeps hit identical points.
  std::vector<double> points() const;
};

struct ThresholdCurve {
  CurveTag tag = CurveTag::single_photon;
  std::vector<ThresholdPoint> points;
  GridSpec grid;
};

/// The swept grid produced no tolerable point at all.
class EmptyCurve : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The rate stayed positive at e_d = 1/2, so there is no upper bracket.
class NonMonotoneRate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest e_d in [0, 1/2] with nonnegative key rate at fixed eta, found by
/// bisection to within `tol`.
///
/// Returns nullopt when no strictly positive rate is reachable even at
/// e_d = 0; this is the transmittance floor, and eta = 1/2 itself falls
/// below it. A rate of exactly zero at the root counts as tolerable.
std::optional<Probability> solve_threshold_ed(const CurveFamily& family, Probability eta,
                                              double tol = kDefaultBisectionTolerance);

/// Solves every grid point, dropping those below the floor. Points are
/// evaluated on `threads` workers (0 = hardware concurrency) and assembled
/// in grid order, so the result does not depend on the thread count.
/// Throws EmptyCurve if nothing survives.
ThresholdCurve sweep_curve(const CurveFamily& family, const GridSpec& grid,
                           double tol = kDefaultBisectionTolerance, unsigned threads = 1);

}  // namespace elqkd
