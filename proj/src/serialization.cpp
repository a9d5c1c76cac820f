#include "elqkd/serialization.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace elqkd {
namespace {

constexpr std::string_view kCurveHeader = "model,eta,e_d_max";

// JSON has no infinities; a saturated z-score is written as null.
Json finite_or_null(double value) {
  if (std::isfinite(value)) return value;
  return nullptr;
}

std::string csv_field(const Json& value) {
  if (value.is_null()) return {};
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number_unsigned()) return std::to_string(value.get<std::uint64_t>());
  if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
  if (value.is_number_float()) return format_fixed9(value.get<double>());
  throw std::invalid_argument("nested values cannot be written as a CSV field");
}

}  // namespace

std::string format_fixed9(double value) { return fmt::format("{:.9f}", value); }

void write_curves_csv(std::ostream& out, std::span<const ThresholdCurve> curves) {
  out << kCurveHeader << '\n';
  for (const auto& curve : curves) {
    const auto name = curve_name(curve.tag);
    for (const auto& point : curve.points) {
      out << name << ',' << format_fixed9(point.eta.value()) << ','
          << format_fixed9(point.e_d_max.value()) << '\n';
    }
  }
}

std::vector<CurveCsvRow> read_curves_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCurveHeader) {
    throw std::runtime_error("curve CSV must start with header '" + std::string(kCurveHeader) +
                             "'");
  }
  std::vector<CurveCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    CurveCsvRow row;
    std::string eta, e_d;
    if (!std::getline(fields, row.model, ',') || !std::getline(fields, eta, ',') ||
        !std::getline(fields, e_d)) {
      throw std::runtime_error("malformed curve CSV row: " + line);
    }
    try {
      row.eta = std::stod(eta);
      row.e_d_max = std::stod(e_d);
    } catch (const std::exception&) {
      throw std::runtime_error("malformed curve CSV row: " + line);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json curves_to_json(std::span<const ThresholdCurve> curves) {
  Json out = Json::array();
  for (const auto& curve : curves) {
    Json points = Json::array();
    for (const auto& p : curve.points) {
      points.push_back({{"eta", p.eta.value()}, {"e_d_max", p.e_d_max.value()}});
    }
    out.push_back({{"model", curve_name(curve.tag)},
                   {"grid",
                    {{"eta_min", curve.grid.eta_min},
                     {"eta_max", curve.grid.eta_max},
                     {"step", curve.grid.step}}},
                   {"points", std::move(points)}});
  }
  return out;
}

Json batch_to_json(const TrialBatch& batch) {
  const auto stats = empirical_stats(batch);
  const auto& t = batch.sifted;
  Json out;
  out["scenario"] = scenario_name(batch.scenario);
  out["model"] = model_name(batch.model);
  out["n_pulses"] = batch.n_pulses();
  out["seed"] = batch.seed;
  out["n_single"] = t.n_single;
  out["n_double"] = t.n_double;
  out["n_none"] = t.n_none;
  out["n_single_errors"] = t.n_single_errors;
  out["q_s"] = stats.stats.q_s.value();
  out["e_s"] = stats.stats.e_s.value();
  out["rate"] = key_rate_single_click(stats.stats).rate;
  return out;
}

Json breakdown_to_json(const KeyRateBreakdown& b, std::string_view model) {
  const auto optional_value = [](const std::optional<Probability>& p) -> Json {
    return p ? Json(p->value()) : Json(nullptr);
  };
  Json out;
  out["model"] = model;
  out["rate"] = b.rate;
  out["operational_rate"] = b.operational_rate();
  out["delta"] = b.delta.value();
  out["phase_bound"] = b.phase_bound;
  out["signal"] = b.signal;
  out["ec_cost"] = b.ec_cost;
  out["pa_cost"] = b.pa_cost;
  out["p_1"] = optional_value(b.p_1);
  out["y_1"] = optional_value(b.y_1);
  out["delta_1"] = optional_value(b.delta_1);
  out["degenerate"] = b.degenerate;
  return out;
}

Json report_to_json(const ComparisonReport& r, const TrialBatch& batch) {
  Json out;
  out["model"] = model_name(batch.model);
  out["n_pulses"] = batch.n_pulses();
  out["seed"] = batch.seed;
  out["q_s"] = r.empirical.stats.q_s.value();
  out["q_s_analytic"] = r.analytic.q_s.value();
  out["q_s_z_score"] = finite_or_null(r.q_s_z_score);
  out["q_s_systematic_bound"] = r.q_s_systematic_bound;
  out["e_s"] = r.empirical.stats.e_s.value();
  out["e_s_analytic"] = r.analytic.e_s.value();
  out["e_s_z_score"] = finite_or_null(r.e_s_z_score);
  out["e_s_systematic_bound"] = r.e_s_systematic_bound;
  out["rate_analytic"] = r.rate_analytic;
  out["rate_empirical"] = r.rate_empirical;
  out["rate_gap"] = r.rate_gap;
  out["z_limit"] = kZScoreLimit;
  out["pass"] = r.pass();
  return out;
}

void write_flat_csv(std::ostream& out, const Json& object) {
  if (!object.is_object()) throw std::invalid_argument("flat CSV needs a JSON object");
  std::string header, values;
  bool first = true;
  for (const auto& [key, value] : object.items()) {
    if (!first) {
      header += ',';
      values += ',';
    }
    first = false;
    header += key;
    values += csv_field(value);
  }
  out << header << '\n' << values << '\n';
}

}  // namespace elqkd
