#include "elqkd/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

namespace elqkd {

std::string_view curve_name(CurveTag tag) noexcept {
  switch (tag) {
    case CurveTag::single_photon:
      return "single-photon";
    case CurveTag::coherent:
      return "coherent";
    case CurveTag::coherent_memory:
      return "coherent-memory";
    case CurveTag::memory_single_photon:
      return "memory-single-photon";
  }
  return "unknown";
}

std::optional<CurveTag> parse_curve_tag(std::string_view name) noexcept {
  for (auto tag : kAllCurveTags) {
    if (curve_name(tag) == name) return tag;
  }
  return std::nullopt;
}

SourceModel model_at(const CurveFamily& family, Probability eta, Probability e_d) {
  switch (family.tag) {
    case CurveTag::single_photon:
    case CurveTag::memory_single_photon:
      return SinglePhoton{eta, e_d};
    case CurveTag::coherent:
      return CoherentDecoy{family.mu, eta, e_d};
    case CurveTag::coherent_memory:
      return CoherentDecoyMemory{family.mu, family.eta_c, eta, e_d};
  }
  throw std::invalid_argument("unknown curve tag");
}

void GridSpec::validate() const {
  if (!(eta_min > 0.0 && eta_min <= eta_max && eta_max <= 1.0)) {
    throw std::invalid_argument("grid must satisfy 0 < eta_min <= eta_max <= 1, got [" +
                                std::to_string(eta_min) + ", " + std::to_string(eta_max) +
                                "]");
  }
  if (!(step > 0.0 && std::isfinite(step))) {
    throw std::invalid_argument("grid step must be > 0, got " + std::to_string(step));
  }
}

std::vector<double> GridSpec::points() const {
  validate();
  const auto count = static_cast<std::size_t>(std::floor((eta_max - eta_min) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double eta = std::round((eta_min + static_cast<double>(i) * step) * 1e12) / 1e12;
    out.push_back(std::min(eta, eta_max));
  }
  return out;
}

std::optional<Probability> solve_threshold_ed(const CurveFamily& family, Probability eta,
                                              double tol) {
  if (!(eta.value() > 0.0)) throw std::invalid_argument("eta must be in (0, 1]");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");

  const auto rate_at = [&](double e_d) {
    return key_rate(model_at(family, eta, Probability{e_d})).rate;
  };

  constexpr double kUpper = 0.5;
  if (rate_at(0.0) <= 0.0) return std::nullopt;
  const double rate_upper = rate_at(kUpper);
  if (rate_upper == 0.0) return Probability{kUpper};
  if (rate_upper > 0.0) {
    throw NonMonotoneRate("key rate is positive at both e_d = 0 and e_d = 1/2 for " +
                          std::string(curve_name(family.tag)) +
                          " at eta = " + std::to_string(eta.value()));
  }
  return Probability{find_root_bisect(rate_at, 0.0, kUpper, tol)};
}

ThresholdCurve sweep_curve(const CurveFamily& family, const GridSpec& grid, double tol,
                           unsigned threads) {
  const auto etas = grid.points();
  std::vector<std::optional<Probability>> solved(etas.size());

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(etas.size()));
  std::vector<std::exception_ptr> failures(threads);
  const auto solve_strided = [&](unsigned worker) {
    try {
      for (std::size_t i = worker; i < etas.size(); i += threads) {
        solved[i] = solve_threshold_ed(family, Probability{etas[i]}, tol);
      }
    } catch (...) {
      failures[worker] = std::current_exception();
    }
  };
  if (threads <= 1) {
    solve_strided(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(solve_strided, w);
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  ThresholdCurve curve{family.tag, {}, grid};
  for (std::size_t i = 0; i < etas.size(); ++i) {
    if (solved[i]) curve.points.push_back({Probability{etas[i]}, *solved[i], family.tag});
  }
  if (curve.points.empty()) {
    throw EmptyCurve("no tolerable point for " + std::string(curve_name(family.tag)) +
                     " on eta in [" + std::to_string(grid.eta_min) + ", " +
                     std::to_string(grid.eta_max) + "]");
  }
  return curve;
}

}  // namespace elqkd
