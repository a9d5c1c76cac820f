#include "elqkd/detection_sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>

#include "overloaded.hpp"

namespace elqkd {
namespace {

using detail::Overloaded;

Basis random_basis(SeededRng& rng) { return rng.coin() ? Basis::Z : Basis::X; }

// Per-photon behaviour shared by every source model.
struct ChannelView {
  double transmittance = 1.0;
  double e_d = 0.0;
  std::optional<double> poisson_mean;  // set for coherent sources
};

ChannelView channel_of(const SourceModel& model) {
  return std::visit(Overloaded{
                        [](const SinglePhoton& m) {
                          return ChannelView{m.eta.value(), m.e_d.value(), std::nullopt};
                        },
                        [](const CoherentDecoy& m) {
                          if (!(m.mu > 0.0 && std::isfinite(m.mu))) {
                            throw std::invalid_argument("mu must be finite and > 0");
                          }
                          return ChannelView{m.eta.value(), m.e_d.value(), m.mu};
                        },
                        [](const CoherentDecoyMemory& m) {
                          // Conditional on the trigger exactly one qubit is stored.
                          return ChannelView{m.eta_m.value(), m.e_d.value(), std::nullopt};
                        },
                    },
                    model);
}

class PulseSimulator {
 public:
  PulseSimulator(const SourceModel& model, const AdversaryStrategy& adversary,
                 double dark_count, SeededRng rng)
      : channel_(channel_of(model)), adversary_(adversary), dark_count_(dark_count),
        rng_(rng) {
    if (channel_.poisson_mean) photons_.emplace(*channel_.poisson_mean);
    if (std::holds_alternative<ExtremeTimeShift>(adversary_)) channel_.transmittance = 1.0;
  }

  TrialRecord next() {
    TrialRecord trial;
    trial.alice_bit = rng_.coin() ? 1 : 0;
    trial.alice_basis = random_basis(rng_);
    trial.bob_basis = random_basis(rng_);

    if (const auto* strong = std::get_if<StrongPulse>(&adversary_)) {
      trial.outcome = apply_strong_pulse(trial.alice_bit, trial.alice_basis, trial.bob_basis,
                                         strong->n_photons, rng_);
    } else {
      const auto hits = route(trial.alice_bit, trial.sifted());
      if (std::holds_alternative<ExtremeTimeShift>(adversary_)) {
        trial.outcome = apply_extreme_time_shift(hits, rng_, dark_count_);
      } else {
        trial.outcome = outcome_from_clicks(fires(hits[0]), fires(hits[1]));
      }
    }

    if (const auto* single = std::get_if<SingleClick>(&trial.outcome)) {
      trial.assigned_bit = single->bit;
      trial.from_random_assignment = false;
    } else {
      trial.assigned_bit = rng_.coin() ? 1 : 0;
      trial.from_random_assignment = true;
    }
    return trial;
  }

 private:
  std::uint32_t emitted() {
    return photons_ ? (*photons_)(rng_) : 1u;
  }

  std::array<std::uint32_t, 2> route(std::uint8_t alice_bit, bool bases_match) {
    std::array<std::uint32_t, 2> hits{0, 0};
    const std::uint32_t n = emitted();
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!rng_.bernoulli(channel_.transmittance)) continue;
      std::uint8_t detector;
      if (bases_match) {
        detector = rng_.bernoulli(channel_.e_d) ? 1 - alice_bit : alice_bit;
      } else {
        detector = rng_.coin() ? 1 : 0;
      }
      ++hits[detector];
    }
    return hits;
  }

  bool fires(std::uint32_t photons) {
    return photons > 0 || (dark_count_ > 0.0 && rng_.bernoulli(dark_count_));
  }

  ChannelView channel_;
  AdversaryStrategy adversary_;
  double dark_count_;
  SeededRng rng_;
  std::optional<std::poisson_distribution<std::uint32_t>> photons_;
};

void validate_run(const AdversaryStrategy& adversary, double dark_count) {
  if (const auto* strong = std::get_if<StrongPulse>(&adversary); strong && strong->n_photons < 1) {
    throw std::invalid_argument("strong pulse needs n_photons >= 1");
  }
  if (!(dark_count >= 0.0 && dark_count <= 1.0)) {
    throw std::invalid_argument("dark count probability must be in [0, 1]");
  }
}

// Calls sink(shard_index, simulator, shard_length) for each shard of a run.
template <class Sink>
void for_each_shard_range(std::uint64_t first_shard, std::uint64_t stride,
                          std::uint64_t n_pulses, const SourceModel& model,
                          const AdversaryStrategy& adversary, std::uint64_t seed,
                          double dark_count, Sink&& sink) {
  const SeededRng root{seed};
  const std::uint64_t n_shards = (n_pulses + kShardSize - 1) / kShardSize;
  for (std::uint64_t shard = first_shard; shard < n_shards; shard += stride) {
    const std::uint64_t begin = shard * kShardSize;
    const std::uint64_t length = std::min(kShardSize, n_pulses - begin);
    PulseSimulator simulator{model, adversary, dark_count, root.split(shard)};
    for (std::uint64_t i = 0; i < length; ++i) sink(simulator.next());
  }
}

double z_score(double observed, double expected, std::uint64_t n) {
  const double deviation = observed - expected;
  if (n == 0) return 0.0;
  const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n));
  if (sigma == 0.0) {
    if (deviation == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), deviation);
  }
  return deviation / sigma;
}

bool within_policy(double observed, double expected, double systematic, std::uint64_t n) {
  const double excess = std::max(0.0, std::abs(observed - expected) - systematic);
  if (excess == 0.0) return true;
  if (n == 0) return false;
  const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n));
  return excess <= kZScoreLimit * sigma;
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClickOutcome outcome_from_clicks(bool detector0, bool detector1) noexcept {
  if (detector0 && detector1) return DoubleClick{};
  if (detector0) return SingleClick{0};
  if (detector1) return SingleClick{1};
  return NoClick{};
}

std::string_view scenario_name(Scenario scenario) noexcept {
  switch (scenario) {
    case Scenario::honest:
      return "honest";
    case Scenario::time_shift:
      return "time_shift";
    case Scenario::strong_pulse:
      return "strong_pulse";
  }
  return "unknown";
}

Scenario scenario_of(const AdversaryStrategy& adversary) noexcept {
  return std::visit(Overloaded{
                        [](const NoAdversary&) { return Scenario::honest; },
                        [](const ExtremeTimeShift&) { return Scenario::time_shift; },
                        [](const StrongPulse&) { return Scenario::strong_pulse; },
                    },
                    adversary);
}

void ClickTally::record(const TrialRecord& trial) noexcept {
  std::visit(Overloaded{
                 [&](const SingleClick&) {
                   ++n_single;
                   if (trial.bit_error()) ++n_single_errors;
                 },
                 [&](const DoubleClick&) {
                   ++n_double;
                   if (trial.bit_error()) ++n_double_assignment_errors;
                 },
                 [&](const NoClick&) {
                   ++n_none;
                   if (trial.bit_error()) ++n_none_assignment_errors;
                 },
             },
             trial.outcome);
}

ClickTally& ClickTally::operator+=(const ClickTally& other) noexcept {
  n_single += other.n_single;
  n_single_errors += other.n_single_errors;
  n_double += other.n_double;
  n_none += other.n_none;
  n_double_assignment_errors += other.n_double_assignment_errors;
  n_none_assignment_errors += other.n_none_assignment_errors;
  return *this;
}

ClickOutcome apply_extreme_time_shift(std::array<std::uint32_t, 2> photons_at_detector,
                                      SeededRng& rng, double dark_count) {
  const std::size_t active = rng.coin() ? 1 : 0;
  const bool fired = photons_at_detector[active] > 0 ||
                     (dark_count > 0.0 && rng.bernoulli(dark_count));
  if (!fired) return NoClick{};
  return SingleClick{static_cast<std::uint8_t>(active)};
}

ClickOutcome apply_strong_pulse(std::uint8_t alice_bit, Basis alice_basis, Basis bob_basis,
                                std::uint32_t n_photons, SeededRng& rng) {
  if (n_photons < 1) throw std::invalid_argument("strong pulse needs n_photons >= 1");
  const Basis eve_basis = random_basis(rng);
  const std::uint8_t eve_bit = eve_basis == alice_basis ? alice_bit : (rng.coin() ? 1 : 0);
  if (bob_basis == eve_basis) return SingleClick{eve_bit};

  std::array<std::uint32_t, 2> hits{0, 0};
  for (std::uint32_t i = 0; i < n_photons; ++i) ++hits[rng.coin() ? 1 : 0];
  return outcome_from_clicks(hits[0] > 0, hits[1] > 0);
}

TrialBatch run_trials(const SourceModel& model, const AdversaryStrategy& adversary,
                      std::uint64_t n_pulses, std::uint64_t seed, RunOptions options) {
  if (n_pulses == 0) throw std::invalid_argument("n_pulses must be > 0");
  validate_run(adversary, options.dark_count);
  channel_of(model);

  const std::uint64_t n_shards = (n_pulses + kShardSize - 1) / kShardSize;
  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                          : options.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n_shards));

  struct Partial {
    ClickTally sifted;
    ClickTally mismatched;
    std::exception_ptr failure;
  };
  std::vector<Partial> partials(threads);
  const auto work = [&](unsigned worker) {
    auto& part = partials[worker];
    try {
      for_each_shard_range(worker, threads, n_pulses, model, adversary, seed,
                           options.dark_count, [&](const TrialRecord& trial) {
                             (trial.sifted() ? part.sifted : part.mismatched).record(trial);
                           });
    } catch (...) {
      part.failure = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }

  TrialBatch batch;
  batch.scenario = scenario_of(adversary);
  batch.model = family_of(model);
  batch.seed = seed;
  batch.n_sent = n_pulses;
  for (const auto& part : partials) {
    if (part.failure) std::rethrow_exception(part.failure);
    batch.sifted += part.sifted;
    batch.mismatched += part.mismatched;
  }
  return batch;
}

std::vector<TrialRecord> sample_records(const SourceModel& model,
                                        const AdversaryStrategy& adversary,
                                        std::uint64_t n_pulses, std::uint64_t seed,
                                        double dark_count) {
  validate_run(adversary, dark_count);
  channel_of(model);
  std::vector<TrialRecord> records;
  records.reserve(n_pulses);
  for_each_shard_range(0, 1, n_pulses, model, adversary, seed, dark_count,
                       [&](const TrialRecord& trial) { records.push_back(trial); });
  return records;
}

EmpiricalStats empirical_stats(const TrialBatch& batch) {
  const auto& t = batch.sifted;
  EmpiricalStats out;
  out.stats.q_s = Probability{ratio(t.n_single, t.total())};
  out.stats.e_s = Probability{ratio(t.n_single_errors, std::max<std::uint64_t>(t.n_single, 1))};
  out.degenerate = t.n_single == 0;
  return out;
}

Probability tallied_qber(const TrialBatch& batch) {
  const auto& t = batch.sifted;
  const std::uint64_t errors =
      t.n_single_errors + t.n_double_assignment_errors + t.n_none_assignment_errors;
  return Probability{ratio(errors, t.total())};
}

DetectionStats traditional_stats(const TrialBatch& batch) {
  const auto& t = batch.sifted;
  const std::uint64_t kept = t.n_single + t.n_double;
  return {Probability{ratio(kept, t.total())},
          Probability{ratio(t.n_single_errors + t.n_double_assignment_errors, kept)}};
}

double double_click_neglect_bound(const SourceModel& model) {
  if (const auto* coherent = std::get_if<CoherentDecoy>(&model)) {
    const double mean = coherent->eta.value() * coherent->mu;
    return std::max(0.0, -std::expm1(-mean) - mean * std::exp(-mean));
  }
  return 0.0;
}

ComparisonReport compare_to_analytic(const SourceModel& model, const TrialBatch& batch) {
  if (batch.scenario != Scenario::honest) {
    throw std::invalid_argument("no closed-form prediction exists for scenario " +
                                std::string(scenario_name(batch.scenario)));
  }
  if (batch.model != family_of(model)) {
    throw std::invalid_argument("batch was produced by model " +
                                std::string(model_name(batch.model)) + ", not " +
                                std::string(model_name(model)));
  }

  ComparisonReport report;
  report.analytic = analytic_stats(model);
  report.empirical = empirical_stats(batch);
  const std::uint64_t n = batch.n_pulses();
  const std::uint64_t n_single = batch.sifted.n_single;

  const double q_an = report.analytic.q_s.value();
  const double e_an = report.analytic.e_s.value();
  const double q_emp = report.empirical.stats.q_s.value();
  const double e_emp = report.empirical.stats.e_s.value();

  report.q_s_systematic_bound = double_click_neglect_bound(model);
  report.e_s_systematic_bound = q_an > 0.0 ? report.q_s_systematic_bound / q_an : 0.0;

  report.q_s_z_score = z_score(q_emp, q_an, n);
  report.q_s_pass = within_policy(q_emp, q_an, report.q_s_systematic_bound, n);
  if (report.empirical.degenerate) {
    report.e_s_z_score = 0.0;
    report.e_s_pass = true;
  } else {
    report.e_s_z_score = z_score(e_emp, e_an, n_single);
    report.e_s_pass = within_policy(e_emp, e_an, report.e_s_systematic_bound, n_single);
  }

  const DetectionStats observed = report.empirical.stats;
  report.rate_analytic = key_rate(model).rate;
  report.rate_empirical = std::visit(
      Overloaded{
          [&](const SinglePhoton&) { return key_rate_single_click(observed).rate; },
          [&](const CoherentDecoy& m) {
            auto params = coherent_stats(m);
            params.stats = observed;
            return key_rate_coherent(params).rate;
          },
          [&](const CoherentDecoyMemory& m) {
            auto params = coherent_memory_stats(m);
            params.stats = observed;
            return key_rate_coherent(params).rate;
          },
      },
      model);
  report.rate_gap = std::abs(report.rate_empirical - report.rate_analytic);
  return report;
}

}  // namespace elqkd
