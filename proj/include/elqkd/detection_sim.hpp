#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "elqkd/rate_models.hpp"
#include "elqkd/rng.hpp"

namespace elqkd {

enum class Basis : std::uint8_t { X, Z };

struct NoClick {
  friend bool operator==(NoClick, NoClick) = default;
};
struct SingleClick {
  std::uint8_t bit = 0;
  friend bool operator==(SingleClick, SingleClick) = default;
};
struct DoubleClick {
  friend bool operator==(DoubleClick, DoubleClick) = default;
};

/// Flag measurement of a two-detector system: none, exactly one, or both
/// threshold detectors fired.
using ClickOutcome = std::variant<NoClick, SingleClick, DoubleClick>;

/// Flag from the two detector states.
ClickOutcome outcome_from_clicks(bool detector0, bool detector1) noexcept;

/// One pulse after the modified pre-processing. Single clicks keep their bit
/// (string s_s); no clicks and double clicks get a fair-coin bit (string s_r).
struct TrialRecord {
  std::uint8_t alice_bit = 0;
  Basis alice_basis = Basis::X;
  Basis bob_basis = Basis::X;
  ClickOutcome outcome;
  std::uint8_t assigned_bit = 0;
  bool from_random_assignment = false;

  bool sifted() const noexcept { return alice_basis == bob_basis; }
  bool bit_error() const noexcept { return assigned_bit != alice_bit; }
};

struct NoAdversary {};

/// Eve makes one detector fully efficient and the other blind, picked by a
/// fair coin per pulse. She learns every bit that survives.
struct ExtremeTimeShift {};

/// Intercept in a random basis, resend `n_photons` copies of the result.
struct StrongPulse {
  std::uint32_t n_photons = 20;
};

using AdversaryStrategy = std::variant<NoAdversary, ExtremeTimeShift, StrongPulse>;

enum class Scenario { honest, time_shift, strong_pulse };

std::string_view scenario_name(Scenario scenario) noexcept;
Scenario scenario_of(const AdversaryStrategy& adversary) noexcept;

/// Counts over one population of pulses (sifted or basis-mismatched).
struct ClickTally {
  std::uint64_t n_single = 0;
  std::uint64_t n_single_errors = 0;
  std::uint64_t n_double = 0;
  std::uint64_t n_none = 0;
  /// Errors among the random bits assigned to double clicks and no clicks.
  /// They enter delta but never the key.
  std::uint64_t n_double_assignment_errors = 0;
  std::uint64_t n_none_assignment_errors = 0;

  std::uint64_t total() const noexcept { return n_single + n_double + n_none; }
  void record(const TrialRecord& trial) noexcept;
  ClickTally& operator+=(const ClickTally& other) noexcept;
  friend bool operator==(const ClickTally&, const ClickTally&) = default;
};

/// Tallies from one Monte Carlo run. Key statistics come from the sifted
/// (basis-matched) population; n_pulses() counts that population, while
/// n_sent counts every simulated pulse.
struct TrialBatch {
  Scenario scenario = Scenario::honest;
  ModelFamily model = ModelFamily::single_photon;
  std::uint64_t seed = 0;
  std::uint64_t n_sent = 0;
  ClickTally sifted;
  ClickTally mismatched;

  std::uint64_t n_pulses() const noexcept { return sifted.total(); }
  friend bool operator==(const TrialBatch&, const TrialBatch&) = default;
};

struct RunOptions {
  /// Worker threads; 0 picks the hardware concurrency. Results do not
  /// depend on this value.
  unsigned threads = 0;
  /// Per-detector dark-count probability for the honest and time-shift
  /// paths. The closed-form models assume zero.
  double dark_count = 0.0;
};

/// Pulses per RNG shard. Shard i of a run with seed s draws from
/// SeededRng{s}.split(i).
inline constexpr std::uint64_t kShardSize = std::uint64_t{1} << 16;

/// Extreme time-shift gate applied to the photon counts that would reach
/// detector 0 and 1. Only the randomly chosen active detector can fire.
ClickOutcome apply_extreme_time_shift(std::array<std::uint32_t, 2> photons_at_detector,
                                      SeededRng& rng, double dark_count = 0.0);

/// Strong-pulse intercept-resend. Eve measures in a uniform basis (getting
/// Alice's bit when the bases agree, a fair coin otherwise) and resends
/// n_photons copies without loss. If Bob measures in Eve's basis every photon
/// hits the detector of Eve's bit; otherwise each photon goes either way
/// with probability 1/2. Throws std::invalid_argument for n_photons = 0.
ClickOutcome apply_strong_pulse(std::uint8_t alice_bit, Basis alice_basis, Basis bob_basis,
                                std::uint32_t n_photons, SeededRng& rng);

/// Simulates n_pulses pulses and tallies the outcomes.
///
/// Per pulse Alice draws a uniform bit and basis and Bob a uniform basis.
/// Honest channels lose each photon independently with probability 1 - eta
/// and misroute a surviving photon with probability e_d when the bases match
/// (uniformly otherwise). Coherent pulses carry Poisson(mu) photons. Memory
/// pulses are simulated conditional on the trigger: the stored qubit is read
/// out with probability eta_M. Under ExtremeTimeShift the transmittance (or
/// readout) is taken as 1 so that Eve's gate is the only loss.
///
/// Deterministic in (model, adversary, n_pulses, seed) and independent of
/// the thread count.
TrialBatch run_trials(const SourceModel& model, const AdversaryStrategy& adversary,
                      std::uint64_t n_pulses, std::uint64_t seed, RunOptions options = {});

/// Per-pulse records of the same stream run_trials tallies. For inspection
/// and tests on small n.
std::vector<TrialRecord> sample_records(const SourceModel& model,
                                        const AdversaryStrategy& adversary,
                                        std::uint64_t n_pulses, std::uint64_t seed,
                                        double dark_count = 0.0);

struct EmpiricalStats {
  DetectionStats stats;
  bool degenerate = false;  ///< no single clicks, E_s undefined (reported as 0)
};

/// Q_s = n_single / n_pulses and E_s = n_single_errors / max(n_single, 1)
/// over the sifted population.
EmpiricalStats empirical_stats(const TrialBatch& batch);

/// Overall QBER counted directly from the tallies, random-assignment errors
/// included. Agrees with qber(empirical_stats(batch).stats) in expectation.
Probability tallied_qber(const TrialBatch& batch);

/// Gain and error rate of the traditional pre-processing, where no clicks
/// are dropped and double clicks are kept with a random bit.
DetectionStats traditional_stats(const TrialBatch& batch);

/// Probability that a coherent pulse delivers two or more photons to Bob,
/// 1 - e^{-eta mu} - eta mu e^{-eta mu}. This is the mass the closed-form
/// coherent model ignores by neglecting double clicks; zero for the other
/// models.
double double_click_neglect_bound(const SourceModel& model);

inline constexpr double kZScoreLimit = 3.0;

struct ComparisonReport {
  DetectionStats analytic;
  EmpiricalStats empirical;
  double q_s_z_score = 0.0;
  double e_s_z_score = 0.0;
  /// Allowed systematic offsets from neglected double clicks: the bound
  /// itself for Q_s, and bound / Q_s for E_s.
  double q_s_systematic_bound = 0.0;
  double e_s_systematic_bound = 0.0;
  double rate_analytic = 0.0;
  double rate_empirical = 0.0;
  double rate_gap = 0.0;
  bool q_s_pass = false;
  bool e_s_pass = false;

  bool pass() const noexcept { return q_s_pass && e_s_pass; }
};

/// Scores an honest batch against the closed-form prediction for the same
/// model. Z-scores use binomial standard errors at the analytic values;
/// a statistic passes when its deviation beyond the systematic bound is at
/// most kZScoreLimit standard errors. Throws std::invalid_argument for
/// adversarial batches or a model/batch family mismatch.
ComparisonReport compare_to_analytic(const SourceModel& model, const TrialBatch& batch);

}  // namespace elqkd
