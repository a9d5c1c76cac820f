#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "elqkd/detection_sim.hpp"
#include "elqkd/rate_models.hpp"
#include "elqkd/threshold.hpp"

namespace elqkd {

using Json = nlohmann::ordered_json;

/// Fixed-point with nine decimals, '.' separator. Used for every CSV number.
std::string format_fixed9(double value);

/// Header `model,eta,e_d_max`, then one LF-terminated row per point, curves
/// in the order given.
void write_curves_csv(std::ostream& out, std::span<const ThresholdCurve> curves);

struct CurveCsvRow {
  std::string model;
  double eta = 0.0;
  double e_d_max = 0.0;
};

/// Parses what write_curves_csv emits. Throws std::runtime_error on a bad
/// header or malformed row.
std::vector<CurveCsvRow> read_curves_csv(std::istream& in);

Json curves_to_json(std::span<const ThresholdCurve> curves);

/// Exactly {scenario, model, n_pulses, seed, n_single, n_double, n_none,
/// n_single_errors, q_s, e_s, rate}. Counts are over the sifted population;
/// rate is the single-click rate on the empirical statistics.
Json batch_to_json(const TrialBatch& batch);

Json breakdown_to_json(const KeyRateBreakdown& breakdown, std::string_view model);

Json report_to_json(const ComparisonReport& report, const TrialBatch& batch);

/// One header row of keys and one row of values from a flat JSON object.
/// Floating values use format_fixed9, null becomes an empty field.
void write_flat_csv(std::ostream& out, const Json& object);

}  // namespace elqkd
