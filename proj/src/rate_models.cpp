#include "elqkd/rate_models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elqkd/entropy.hpp"
#include "overloaded.hpp"

namespace elqkd {
namespace {

using detail::Overloaded;

void require_positive_intensity(double mu) {
  if (!(std::isfinite(mu) && mu > 0.0)) {
    throw std::invalid_argument("mean photon number mu must be finite and > 0, got " +
                                std::to_string(mu));
  }
}

// Probabilities computed from valid inputs can land an ulp outside [0, 1].
Probability clamped_probability(double value) {
  return Probability{std::clamp(value, 0.0, 1.0)};
}

}  // namespace

std::string_view model_name(ModelFamily family) noexcept {
  switch (family) {
    case ModelFamily::single_photon:
      return "single-photon";
    case ModelFamily::coherent:
      return "coherent";
    case ModelFamily::coherent_memory:
      return "coherent-memory";
  }
  return "unknown";
}

std::string_view model_name(const SourceModel& model) noexcept {
  return model_name(family_of(model));
}

std::optional<ModelFamily> parse_model_family(std::string_view name) noexcept {
  for (auto family :
       {ModelFamily::single_photon, ModelFamily::coherent, ModelFamily::coherent_memory}) {
    if (model_name(family) == name) return family;
  }
  return std::nullopt;
}

ModelFamily family_of(const SourceModel& model) noexcept {
  return std::visit(Overloaded{
                        [](const SinglePhoton&) { return ModelFamily::single_photon; },
                        [](const CoherentDecoy&) { return ModelFamily::coherent; },
                        [](const CoherentDecoyMemory&) { return ModelFamily::coherent_memory; },
                    },
                    model);
}

SourceModel make_source_model(ModelFamily family, const SystemParams& params) {
  if (params.e_0 != kRandomAssignmentError) {
    throw std::invalid_argument("e_0 is fixed at 0.5");
  }
  if (params.dark_count != 0.0) {
    throw std::invalid_argument("dark counts are not part of the closed-form models");
  }
  switch (family) {
    case ModelFamily::single_photon:
      return SinglePhoton{params.eta, params.e_d};
    case ModelFamily::coherent:
      require_positive_intensity(params.mu);
      return CoherentDecoy{params.mu, params.eta, params.e_d};
    case ModelFamily::coherent_memory:
      require_positive_intensity(params.mu);
      if (params.eta_c.value() == 0.0) throw DegenerateInput("eta_c must be > 0");
      return CoherentDecoyMemory{params.mu, params.eta_c, params.eta_m, params.e_d};
  }
  throw std::invalid_argument("unknown model family");
}

Probability qber(const DetectionStats& stats, Probability e_0) {
  const double q = stats.q_s.value();
  return clamped_probability(stats.e_s.value() * q + e_0.value() * (1.0 - q));
}

double rate_basis_independent_baseline(Probability delta) {
  return 1.0 - 2.0 * binary_entropy(std::min(delta.value(), 0.5));
}

double phase_error_single_bound(Probability delta, Probability q_s) {
  if (q_s.value() == 0.0) {
    throw DegenerateInput("phase error bound is vacuous for Q_s = 0");
  }
  return std::min(delta.value() / q_s.value(), kMaxPhaseErrorArgument);
}

KeyRateBreakdown key_rate_single_click(const DetectionStats& stats, Probability e_0) {
  KeyRateBreakdown out;
  out.delta = qber(stats, e_0);
  const double q = stats.q_s.value();
  if (q == 0.0) {
    out.phase_bound = kMaxPhaseErrorArgument;
    out.degenerate = true;
    return out;
  }
  out.phase_bound = out.delta.value() / q;
  const double bound = phase_error_single_bound(out.delta, stats.q_s);
  out.signal = q;
  out.ec_cost = q * binary_entropy(stats.e_s);
  out.pa_cost = q * binary_entropy(bound);
  out.rate = out.signal - out.ec_cost - out.pa_cost;
  return out;
}

DetectionStats single_photon_stats(const SinglePhoton& model) {
  return {model.eta, model.e_d};
}

CoherentParams coherent_stats(const CoherentDecoy& model, Probability e_0) {
  require_positive_intensity(model.mu);
  const double eta = model.eta.value();
  const double e_d = model.e_d.value();
  CoherentParams out;
  out.stats.q_s = clamped_probability(-std::expm1(-eta * model.mu));
  out.stats.e_s = model.e_d;
  out.p_1 = clamped_probability(model.mu * std::exp(-model.mu));
  out.y_1 = model.eta;
  out.delta_1 = clamped_probability(e_d * eta + e_0.value() * (1.0 - eta));
  return out;
}

CoherentParams coherent_memory_stats(const CoherentDecoyMemory& model, Probability e_0) {
  require_positive_intensity(model.mu);
  const double eta_c = model.eta_c.value();
  if (eta_c == 0.0) throw DegenerateInput("P_1 is undefined for eta_c = 0");
  const double eta_m = model.eta_m.value();
  CoherentParams out;
  out.p_1 = clamped_probability(eta_c * model.mu * std::exp(-model.mu) /
                                (-std::expm1(-eta_c * model.mu)));
  out.stats.q_s = model.eta_m;
  out.stats.e_s = model.e_d;
  out.y_1 = model.eta_m;
  out.delta_1 = clamped_probability(model.e_d.value() * eta_m + e_0.value() * (1.0 - eta_m));
  return out;
}

KeyRateBreakdown key_rate_coherent(const CoherentParams& params, Probability e_0) {
  KeyRateBreakdown out;
  out.delta = qber(params.stats, e_0);
  out.p_1 = params.p_1;
  out.y_1 = params.y_1;
  out.delta_1 = params.delta_1;
  out.ec_cost = params.stats.q_s.value() * binary_entropy(params.stats.e_s);

  const double y_1 = params.y_1.value();
  if (y_1 == 0.0) {
    out.phase_bound = kMaxPhaseErrorArgument;
    out.degenerate = true;
    out.rate = -out.ec_cost;
    return out;
  }
  out.phase_bound = params.delta_1.value() / y_1;
  out.signal = params.p_1.value() * y_1;
  out.pa_cost = out.signal * binary_entropy(std::min(out.phase_bound, kMaxPhaseErrorArgument));
  out.rate = out.signal - out.ec_cost - out.pa_cost;
  return out;
}

KeyRateBreakdown key_rate(const SourceModel& model) {
  return std::visit(
      Overloaded{
          [](const SinglePhoton& m) { return key_rate_single_click(single_photon_stats(m)); },
          [](const CoherentDecoy& m) { return key_rate_coherent(coherent_stats(m)); },
          [](const CoherentDecoyMemory& m) {
            return key_rate_coherent(coherent_memory_stats(m));
          },
      },
      model);
}

DetectionStats analytic_stats(const SourceModel& model) {
  return std::visit(Overloaded{
                        [](const SinglePhoton& m) { return single_photon_stats(m); },
                        [](const CoherentDecoy& m) { return coherent_stats(m).stats; },
                        [](const CoherentDecoyMemory& m) {
                          return coherent_memory_stats(m).stats;
                        },
                    },
                    model);
}

}  // namespace elqkd
