#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "elqkd/detection_sim.hpp"
#include "elqkd/rate_models.hpp"
#include "elqkd/serialization.hpp"
#include "elqkd/threshold.hpp"

namespace elqkd::cli {
namespace {

/// Raised for any parameter outside its documented range.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string model = "single-photon";
  std::optional<double> eta;
  std::optional<double> ed;
  double mu = 0.5;
  double eta_c = 0.01;
  std::optional<double> eta_m;
  double eta_min = 0.5;
  double eta_max = 1.0;
  double step = 0.005;
  double tol = kDefaultBisectionTolerance;
  std::uint64_t seed = 1;
  std::uint64_t n_pulses = 1'000'000;
  std::string adversary = "none";
  std::uint32_t n_photons = 20;
  double dark_count = 0.0;
  unsigned threads = 0;
  std::string out;
  std::string format;
};

Probability probability_flag(std::string_view flag, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ConfigError(fmt::format("invalid parameter --{}: {} is outside [0, 1]", flag, value));
  }
  return Probability{value};
}

double required(std::string_view flag, const std::optional<double>& value,
                std::string_view model) {
  if (!value) {
    throw ConfigError(fmt::format("missing parameter --{} for model {}", flag, model));
  }
  return *value;
}

SourceModel build_model(const RunConfig& cfg) {
  const auto family = parse_model_family(cfg.model);
  if (!family) {
    throw ConfigError(fmt::format(
        "invalid parameter --model: {} is not one of single-photon, coherent, coherent-memory",
        cfg.model));
  }
  if (*family != ModelFamily::single_photon && !(cfg.mu > 0.0 && std::isfinite(cfg.mu))) {
    throw ConfigError(fmt::format("invalid parameter --mu: {} must be > 0", cfg.mu));
  }
  SystemParams params;
  params.mu = cfg.mu;
  params.e_d = probability_flag("ed", required("ed", cfg.ed, cfg.model));
  if (*family == ModelFamily::coherent_memory) {
    params.eta_c = probability_flag("eta-c", cfg.eta_c);
    if (cfg.eta_c == 0.0) {
      throw ConfigError("invalid parameter --eta-c: 0 is outside (0, 1]");
    }
    params.eta_m = probability_flag("eta-m", required("eta-m", cfg.eta_m, cfg.model));
  } else {
    params.eta = probability_flag("eta", required("eta", cfg.eta, cfg.model));
  }
  return make_source_model(*family, params);
}

AdversaryStrategy build_adversary(const RunConfig& cfg) {
  if (cfg.adversary == "none") return NoAdversary{};
  if (cfg.adversary == "time-shift") return ExtremeTimeShift{};
  if (cfg.adversary == "strong-pulse") {
    if (cfg.n_photons < 1) {
      throw ConfigError("invalid parameter --n-photons: must be >= 1");
    }
    return StrongPulse{cfg.n_photons};
  }
  throw ConfigError(fmt::format(
      "invalid parameter --adversary: {} is not one of none, time-shift, strong-pulse",
      cfg.adversary));
}

std::string resolve_format(const RunConfig& cfg, std::string_view fallback) {
  const std::string format = cfg.format.empty() ? std::string(fallback) : cfg.format;
  if (format != "csv" && format != "json") {
    throw ConfigError(
        fmt::format("invalid parameter --format: {} is not one of csv, json", format));
  }
  return format;
}

std::string render(const Json& object, const std::string& format) {
  std::ostringstream text;
  if (format == "csv") {
    write_flat_csv(text, object);
  } else {
    text << object.dump(2) << '\n';
  }
  return text.str();
}

/// Writes to `path` via a temporary sibling and a rename, or to `out` when
/// no path is given.
void emit(const std::string& content, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  const std::filesystem::path target{path};
  std::filesystem::path temp = target;
  temp += ".tmp";
  {
    std::ofstream file(temp, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open " + temp.string() + " for writing");
    file << content;
    if (!file.flush()) throw std::runtime_error("failed writing " + temp.string());
  }
  std::filesystem::rename(temp, target);
}

int cmd_rate(const RunConfig& cfg, std::ostream& out) {
  const auto model = build_model(cfg);
  const auto format = resolve_format(cfg, "json");
  emit(render(breakdown_to_json(key_rate(model), model_name(model)), format), cfg.out, out);
  return kExitOk;
}

int cmd_threshold(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<CurveTag> tags;
  if (cfg.model == "all") {
    tags.assign(std::begin(kAllCurveTags), std::end(kAllCurveTags));
  } else if (const auto tag = parse_curve_tag(cfg.model)) {
    tags.push_back(*tag);
  } else {
    throw ConfigError(fmt::format(
        "invalid parameter --model: {} is not one of single-photon, coherent, "
        "coherent-memory, memory-single-photon, all",
        cfg.model));
  }
  if (!(cfg.mu > 0.0 && std::isfinite(cfg.mu))) {
    throw ConfigError(fmt::format("invalid parameter --mu: {} must be > 0", cfg.mu));
  }
  const Probability eta_c = probability_flag("eta-c", cfg.eta_c);
  if (cfg.eta_c == 0.0) throw ConfigError("invalid parameter --eta-c: 0 is outside (0, 1]");
  if (!(cfg.tol > 0.0)) {
    throw ConfigError(fmt::format("invalid parameter --tol: {} must be > 0", cfg.tol));
  }
  const GridSpec grid{cfg.eta_min, cfg.eta_max, cfg.step};
  try {
    grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid grid: ") + e.what());
  }
  const auto format = resolve_format(cfg, "csv");

  std::vector<ThresholdCurve> curves;
  try {
    for (auto tag : tags) {
      curves.push_back(sweep_curve(CurveFamily{tag, cfg.mu, eta_c}, grid, cfg.tol, cfg.threads));
    }
  } catch (const EmptyCurve& e) {
    err << "error: " << e.what() << '\n';
    return kExitEmptyCurve;
  }

  std::ostringstream text;
  if (format == "csv") {
    write_curves_csv(text, curves);
  } else {
    text << curves_to_json(curves).dump(2) << '\n';
  }
  emit(text.str(), cfg.out, out);
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = build_model(cfg);
  const auto adversary = build_adversary(cfg);
  if (cfg.n_pulses == 0) throw ConfigError("invalid parameter --n-pulses: must be > 0");
  probability_flag("dark-count", cfg.dark_count);
  const auto format = resolve_format(cfg, "json");

  const auto batch = run_trials(model, adversary, cfg.n_pulses, cfg.seed,
                                RunOptions{cfg.threads, cfg.dark_count});
  emit(render(batch_to_json(batch), format), cfg.out, out);
  if (batch.sifted.n_single == 0) {
    err << "error: no single clicks in the sifted population\n";
    return kExitDegenerateSimulation;
  }
  return kExitOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = build_model(cfg);
  if (cfg.adversary != "none") {
    throw ConfigError("invalid parameter --adversary: compare supports only none");
  }
  if (cfg.n_pulses == 0) throw ConfigError("invalid parameter --n-pulses: must be > 0");
  const auto format = resolve_format(cfg, "json");

  const auto batch = run_trials(model, NoAdversary{}, cfg.n_pulses, cfg.seed,
                                RunOptions{cfg.threads, 0.0});
  const auto report = compare_to_analytic(model, batch);
  emit(render(report_to_json(report, batch), format), cfg.out, out);
  if (report.empirical.degenerate) {
    err << "error: no single clicks in the sifted population\n";
    return kExitDegenerateSimulation;
  }
  return kExitOk;
}

std::string json_scalar_to_arg(const std::string& key, const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number_unsigned()) return std::to_string(value.get<std::uint64_t>());
  if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
  if (value.is_number_float()) return fmt::format("{}", value.get<double>());
  throw ConfigError("config key '" + key + "' must be a scalar");
}

/// Removes --config from `args` and splices the file's fields in as flags
/// right after the subcommand, so explicit flags (parsed later) win.
void merge_config_file(std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (auto it = args.begin(); it != args.end(); ++it) {
    if (*it == "--config") {
      if (std::next(it) == args.end()) throw ConfigError("--config needs a file path");
      path = *std::next(it);
      args.erase(it, std::next(it, 2));
      break;
    }
    if (it->starts_with("--config=")) {
      path = it->substr(std::string_view("--config=").size());
      args.erase(it);
      break;
    }
  }
  if (!path) return;

  std::ifstream file(*path);
  if (!file) throw ConfigError("cannot read config file " + *path);
  Json config;
  try {
    config = Json::parse(file);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file " + *path + " is not valid JSON: " + e.what());
  }
  if (!config.is_object()) throw ConfigError("config file must hold a JSON object");

  std::vector<std::string> injected;
  std::optional<std::string> command;
  for (const auto& [key, value] : config.items()) {
    if (key == "command") {
      command = json_scalar_to_arg(key, value);
      continue;
    }
    injected.push_back("--" + key);
    injected.push_back(json_scalar_to_arg(key, value));
  }
  const bool has_subcommand = !args.empty() && !args.front().starts_with("-");
  if (!has_subcommand) {
    if (!command) throw ConfigError("no subcommand given on the command line or in config");
    args.insert(args.begin(), *command);
  }
  args.insert(std::next(args.begin()), injected.begin(), injected.end());
}

void add_model_options(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--model", cfg.model, "source model")->capture_default_str();
  sub.add_option("--eta", cfg.eta, "overall transmittance");
  sub.add_option("--ed", cfg.ed, "intrinsic detection error probability");
  sub.add_option("--mu", cfg.mu, "mean photon number")->capture_default_str();
  sub.add_option("--eta-c", cfg.eta_c, "channel transmittance to the memory")
      ->capture_default_str();
  sub.add_option("--eta-m", cfg.eta_m, "memory readout probability");
}

void add_output_options(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--out", cfg.out, "output file (default: stdout)");
  sub.add_option("--format", cfg.format, "csv or json");
}

void add_simulation_options(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  sub.add_option("--n-pulses", cfg.n_pulses, "pulses to simulate")->capture_default_str();
  sub.add_option("--threads", cfg.threads, "worker threads, 0 = all cores")
      ->capture_default_str();
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Key rates, tolerable-region curves and detection simulations for "
               "efficiency-loophole-free QKD post-processing",
               "elqkd"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto* rate = app.add_subcommand("rate", "evaluate the key rate of one configuration");
  add_model_options(*rate, cfg);
  add_output_options(*rate, cfg);

  auto* threshold = app.add_subcommand("threshold", "sweep the tolerable (eta, e_d) boundary");
  threshold->add_option("--model", cfg.model,
                        "single-photon, coherent, coherent-memory, memory-single-photon or all")
      ->capture_default_str();
  threshold->add_option("--mu", cfg.mu, "mean photon number")->capture_default_str();
  threshold->add_option("--eta-c", cfg.eta_c, "channel transmittance to the memory")
      ->capture_default_str();
  threshold->add_option("--eta-min", cfg.eta_min)->capture_default_str();
  threshold->add_option("--eta-max", cfg.eta_max)->capture_default_str();
  threshold->add_option("--step", cfg.step)->capture_default_str();
  threshold->add_option("--tol", cfg.tol, "bisection tolerance on e_d")->capture_default_str();
  threshold->add_option("--threads", cfg.threads)->capture_default_str();
  add_output_options(*threshold, cfg);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of the detection system");
  add_model_options(*simulate, cfg);
  add_simulation_options(*simulate, cfg);
  simulate->add_option("--adversary", cfg.adversary, "none, time-shift or strong-pulse")
      ->capture_default_str();
  simulate->add_option("--n-photons", cfg.n_photons, "strong-pulse photon number")
      ->capture_default_str();
  simulate->add_option("--dark-count", cfg.dark_count, "per-detector dark-count probability")
      ->capture_default_str();
  add_output_options(*simulate, cfg);

  auto* compare = app.add_subcommand("compare", "score an honest simulation against the model");
  add_model_options(*compare, cfg);
  add_simulation_options(*compare, cfg);
  compare->add_option("--adversary", cfg.adversary, "must be none")->capture_default_str();
  add_output_options(*compare, cfg);

  try {
    merge_config_file(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  try {
    if (rate->parsed()) return cmd_rate(cfg, out);
    if (threshold->parsed()) return cmd_threshold(cfg, out, err);
    if (simulate->parsed()) return cmd_simulate(cfg, out, err);
    if (compare->parsed()) return cmd_compare(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
  return kExitInvalidConfig;
}

}  // namespace elqkd::cli
