#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <variant>

#include "elqkd/probability.hpp"

namespace elqkd {

/// Largest argument passed to H2 for a phase-error bound. Past 1/2 the
/// privacy-amplification cost is already total, and H2 would start to fall.
inline constexpr double kMaxPhaseErrorArgument = 0.5;

/// A formula was evaluated at a point where it is undefined (zero click rate,
/// zero memory coupling, ...).
class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Perfect single photon source. Also describes a basis-independent source
/// read out of a quantum memory, with eta taken as the readout probability.
struct SinglePhoton {
  Probability eta;  ///< overall transmittance (channel x detection)
  Probability e_d;  ///< intrinsic detection error probability
};

/// Weak coherent source with decoy-state estimation of the single-photon part.
struct CoherentDecoy {
  double mu = 0.5;  ///< mean photon number
  Probability eta;
  Probability e_d;
};

/// Weak coherent source whose pulses are heralded by a quantum memory. All
/// derived quantities are conditional on the memory trigger.
struct CoherentDecoyMemory {
  double mu = 0.5;
  Probability eta_c{0.01};  ///< channel transmittance to the memory
  Probability eta_m;        ///< memory readout probability
  Probability e_d;
};

using SourceModel = std::variant<SinglePhoton, CoherentDecoy, CoherentDecoyMemory>;

enum class ModelFamily { single_photon, coherent, coherent_memory };

std::string_view model_name(ModelFamily family) noexcept;
std::string_view model_name(const SourceModel& model) noexcept;
std::optional<ModelFamily> parse_model_family(std::string_view name) noexcept;
ModelFamily family_of(const SourceModel& model) noexcept;

/// Flat bag of physical parameters, the shape the CLI and config files use.
/// Only the fields relevant to a family are read when building a model.
struct SystemParams {
  Probability eta{1.0};
  Probability e_d{0.0};
  Probability e_0 = kRandomAssignmentError;
  double mu = 0.5;
  Probability eta_c{0.01};
  Probability eta_m{1.0};
  /// Per-detector dark-count probability. The closed-form models neglect dark
  /// counts, so anything nonzero is rejected by make_source_model.
  double dark_count = 0.0;
};

/// Builds the variant for `family`, validating mu and rejecting dark counts
/// and any e_0 other than 1/2. Throws std::invalid_argument.
SourceModel make_source_model(ModelFamily family, const SystemParams& params);

/// Observed single-click rate Q_s and the error rate among single clicks E_s.
struct DetectionStats {
  Probability q_s;
  Probability e_s;
};

/// Single-photon parameters feeding the coherent-state rate.
struct CoherentParams {
  DetectionStats stats;
  Probability p_1;      ///< probability the source emits exactly one photon
  Probability y_1;      ///< single-click yield of single-photon pulses
  Probability delta_1;  ///< error rate of single-photon pulses, random bits included
};

/// A key rate and the terms it is assembled from:
/// rate == signal - ec_cost - pa_cost.
struct KeyRateBreakdown {
  double rate = 0.0;        ///< bits per pulse, not floored at zero
  Probability delta;        ///< overall QBER with random assignment
  double phase_bound = 0.0; ///< unclamped phase-error bound (delta/Q_s or delta_1/Y_1)
  double signal = 0.0;      ///< Q_s, or P_1 Y_1 for coherent sources
  double ec_cost = 0.0;     ///< error-correction term
  double pa_cost = 0.0;     ///< privacy-amplification term
  std::optional<Probability> p_1;
  std::optional<Probability> y_1;
  std::optional<Probability> delta_1;
  /// True when the phase-error bound is vacuous (Q_s = 0 or Y_1 = 0). The
  /// rate is then nonpositive and phase_bound is reported as saturated.
  bool degenerate = false;

  double operational_rate() const noexcept { return rate > 0.0 ? rate : 0.0; }
};

/// delta = E_s Q_s + e_0 (1 - Q_s).
Probability qber(const DetectionStats& stats, Probability e_0 = kRandomAssignmentError);

/// 1 - 2 H2(min(delta, 1/2)), the rate when bit and phase errors coincide and
/// no position information is used.
double rate_basis_independent_baseline(Probability delta);

/// Upper bound min(delta / Q_s, 1/2) on the phase error of the single-click
/// string. Throws DegenerateInput when q_s = 0.
double phase_error_single_bound(Probability delta, Probability q_s);

/// Q_s [1 - H2(E_s) - H2(bound)]. A zero click rate yields rate 0 flagged as
/// degenerate.
KeyRateBreakdown key_rate_single_click(const DetectionStats& stats,
                                       Probability e_0 = kRandomAssignmentError);

/// Dark counts neglected: Q_s = eta, E_s = e_d.
DetectionStats single_photon_stats(const SinglePhoton& model);

/// Q_s = 1 - exp(-eta mu), E_s = e_d, P_1 = mu exp(-mu), Y_1 = eta,
/// delta_1 = e_d Y_1 + e_0 (1 - Y_1). Requires mu > 0.
CoherentParams coherent_stats(const CoherentDecoy& model,
                              Probability e_0 = kRandomAssignmentError);

/// P_1 = eta_c mu exp(-mu) / (1 - exp(-eta_c mu)), Q_s = Y_1 = eta_M,
/// E_s = e_d, delta_1 = e_d eta_M + e_0 (1 - eta_M). Requires mu > 0 and
/// throws DegenerateInput for eta_c = 0.
CoherentParams coherent_memory_stats(const CoherentDecoyMemory& model,
                                     Probability e_0 = kRandomAssignmentError);

/// -Q_s H2(E_s) + P_1 Y_1 [1 - H2(min(delta_1 / Y_1, 1/2))].
KeyRateBreakdown key_rate_coherent(const CoherentParams& params,
                                   Probability e_0 = kRandomAssignmentError);

/// Dispatches to the closed-form stats and rate of the active source model.
KeyRateBreakdown key_rate(const SourceModel& model);

/// Detection statistics the closed-form model predicts for `model`.
DetectionStats analytic_stats(const SourceModel& model);

}  // namespace elqkd
