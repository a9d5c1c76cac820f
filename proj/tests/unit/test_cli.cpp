#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "elqkd/serialization.hpp"

namespace fs = std::filesystem;
using elqkd::Json;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = elqkd::cli::run(std::move(args), out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path dir{ELQKD_TEST_TMPDIR};
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("rate subcommand") {
  auto perfect = invoke({"rate", "--model", "single-photon", "--eta", "1", "--ed", "0"});
  REQUIRE(perfect.status == 0);
  CHECK(Json::parse(perfect.out)["rate"].get<double>() == 1.0);

  auto floor = invoke({"rate", "--model", "single-photon", "--eta", "0.5", "--ed", "0"});
  REQUIRE(floor.status == 0);
  CHECK(Json::parse(floor.out)["rate"].get<double>() == 0.0);

  auto memory = invoke({"rate", "--model", "coherent-memory", "--mu", "0.5", "--eta-c", "0.01",
                        "--eta-m", "1", "--ed", "0"});
  REQUIRE(memory.status == 0);
  CHECK(Json::parse(memory.out)["rate"].get<double>() ==
        doctest::Approx(0.60804824996692957).epsilon(1e-13));

  auto negative = invoke({"rate", "--eta", "0.3", "--ed", "0.1"});
  REQUIRE(negative.status == 0);
  const auto j = Json::parse(negative.out);
  CHECK(j["rate"].get<double>() < 0.0);
  CHECK(j["operational_rate"].get<double>() == 0.0);
}

TEST_CASE("threshold subcommand") {
  auto sweep = invoke({"threshold", "--model", "single-photon"});
  REQUIRE(sweep.status == 0);
  std::istringstream text(sweep.out);
  const auto rows = elqkd::read_curves_csv(text);
  REQUIRE_FALSE(rows.empty());
  CHECK(sweep.out.rfind("single-photon,1.000000000,0.110027864\n") != std::string::npos);
  CHECK(rows.back().eta == 1.0);

  auto all = invoke({"threshold", "--model", "all", "--step", "0.05"});
  REQUIRE(all.status == 0);
  for (const char* name : {"single-photon,", "coherent,", "coherent-memory,",
                           "memory-single-photon,"}) {
    CHECK(all.out.find(std::string("\n") + name) != std::string::npos);
  }

  auto coherent = invoke({"threshold", "--model", "coherent", "--mu", "0.5"});
  REQUIRE(coherent.status == 0);
  std::istringstream coherent_text(coherent.out);
  const auto coherent_rows = elqkd::read_curves_csv(coherent_text);
  for (std::size_t i = 1; i < coherent_rows.size(); ++i) {
    CHECK(coherent_rows[i].e_d_max >= coherent_rows[i - 1].e_d_max);
  }

  auto empty = invoke({"threshold", "--eta-min", "0.1", "--eta-max", "0.5"});
  CHECK(empty.status == elqkd::cli::kExitEmptyCurve);
  CHECK(empty.err.find("no tolerable point") != std::string::npos);

  auto json = invoke({"threshold", "--format", "json", "--step", "0.1"});
  REQUIRE(json.status == 0);
  CHECK(Json::parse(json.out)[0]["model"] == "single-photon");
}

TEST_CASE("simulate subcommand") {
  auto honest = invoke({"simulate", "--eta", "1", "--ed", "0", "--n-pulses", "20000"});
  REQUIRE(honest.status == 0);
  auto j = Json::parse(honest.out);
  CHECK(j["q_s"].get<double>() == 1.0);
  CHECK(j["e_s"].get<double>() == 0.0);
  CHECK(j["rate"].get<double>() == 1.0);
  CHECK(j["scenario"] == "honest");

  for (const char* adversary : {"time-shift", "strong-pulse"}) {
    auto attacked = invoke({"simulate", "--eta", "0.9", "--ed", "0.01", "--adversary", adversary,
                            "--n-pulses", "200000"});
    REQUIRE(attacked.status == 0);
    auto a = Json::parse(attacked.out);
    CHECK(std::abs(a["q_s"].get<double>() - 0.5) < 0.01);
    CHECK(a["rate"].get<double>() <= 0.0);
  }

  auto dark = invoke({"simulate", "--eta", "0", "--ed", "0", "--n-pulses", "1000"});
  CHECK(dark.status == elqkd::cli::kExitDegenerateSimulation);
  CHECK(Json::parse(dark.out)["n_single"] == 0);

  auto csv = invoke({"simulate", "--eta", "1", "--ed", "0", "--n-pulses", "100", "--format",
                     "csv"});
  REQUIRE(csv.status == 0);
  CHECK(csv.out.starts_with(
      "scenario,model,n_pulses,seed,n_single,n_double,n_none,n_single_errors,q_s,e_s,rate\n"));
}

TEST_CASE("compare subcommand") {
  auto perfect = invoke({"compare", "--eta", "1", "--ed", "0", "--n-pulses", "50000"});
  REQUIRE(perfect.status == 0);
  auto j = Json::parse(perfect.out);
  CHECK(j["q_s_z_score"].get<double>() == 0.0);
  CHECK(j["e_s_z_score"].get<double>() == 0.0);
  CHECK(j["pass"] == true);

  auto coherent = invoke({"compare", "--model", "coherent", "--mu", "0.5", "--eta", "0.7",
                          "--ed", "0.03", "--n-pulses", "1000000"});
  REQUIRE(coherent.status == 0);
  auto c = Json::parse(coherent.out);
  CHECK(c["pass"] == true);
  CHECK(c["q_s_systematic_bound"].get<double>() > 0.0);

  auto attacked = invoke({"compare", "--eta", "1", "--ed", "0", "--adversary", "time-shift"});
  CHECK(attacked.status == elqkd::cli::kExitInvalidConfig);
}

TEST_CASE("invalid configuration exits with status 2 and a named range") {
  auto eta = invoke({"rate", "--eta", "1.5", "--ed", "0"});
  CHECK(eta.status == 2);
  CHECK(eta.err == "error: invalid parameter --eta: 1.5 is outside [0, 1]\n");

  auto ed = invoke({"rate", "--eta", "0.5", "--ed", "-0.1"});
  CHECK(ed.status == 2);
  CHECK(ed.err == "error: invalid parameter --ed: -0.1 is outside [0, 1]\n");

  CHECK(invoke({"rate", "--eta", "0.5"}).status == 2);
  CHECK(invoke({"rate", "--model", "pdc", "--eta", "0.5", "--ed", "0"}).status == 2);
  CHECK(invoke({"rate", "--model", "coherent", "--mu", "0", "--eta", "0.5", "--ed", "0"}).status ==
        2);
  CHECK(invoke({"rate", "--model", "coherent-memory", "--eta-c", "0", "--eta-m", "0.9", "--ed",
                "0"})
            .status == 2);
  CHECK(invoke({"threshold", "--step", "0"}).status == 2);
  CHECK(invoke({"threshold", "--eta-max", "1.2"}).status == 2);
  CHECK(invoke({"simulate", "--eta", "1", "--ed", "0", "--n-pulses", "0"}).status == 2);
  CHECK(invoke({"simulate", "--eta", "1", "--ed", "0", "--adversary", "eve"}).status == 2);
  CHECK(invoke({"simulate", "--eta", "1", "--ed", "0", "--adversary", "strong-pulse",
                "--n-photons", "0"})
            .status == 2);
  CHECK(invoke({"rate", "--eta", "1", "--ed", "0", "--format", "xml"}).status == 2);
  CHECK(invoke({"rate", "--bogus", "1"}).status == 2);
  CHECK(invoke({}).status == 2);

  const auto first = invoke({"rate", "--eta", "2", "--ed", "0"});
  const auto second = invoke({"rate", "--eta", "2", "--ed", "0"});
  CHECK(first.err == second.err);
}

TEST_CASE("output files are written atomically and reproducibly") {
  const auto path = scratch("sim.json");
  fs::remove(path);
  const std::vector<std::string> args{"simulate", "--model", "coherent", "--eta", "0.8", "--ed",
                                      "0.02", "--n-pulses", "300000", "--seed", "9", "--out",
                                      path.string()};
  REQUIRE(invoke(args).status == 0);
  const auto first = slurp(path);
  CHECK_FALSE(fs::exists(path.string() + ".tmp"));
  REQUIRE(invoke(args).status == 0);
  CHECK(slurp(path) == first);

  auto threads = args;
  threads.insert(threads.end(), {"--threads", "1"});
  REQUIRE(invoke(threads).status == 0);
  CHECK(slurp(path) == first);
}

TEST_CASE("JSON config files merge under explicit flags") {
  const auto config = scratch("config.json");
  {
    std::ofstream out(config);
    out << R"({"command": "rate", "model": "coherent", "eta": 0.8, "ed": 0.02, "mu": 0.3})";
  }
  auto from_file = invoke({"--config", config.string()});
  REQUIRE(from_file.status == 0);
  auto direct = invoke({"rate", "--model", "coherent", "--eta", "0.8", "--ed", "0.02", "--mu",
                        "0.3"});
  CHECK(from_file.out == direct.out);

  auto overridden = invoke({"rate", "--config", config.string(), "--eta", "0.9"});
  REQUIRE(overridden.status == 0);
  auto expected = invoke({"rate", "--model", "coherent", "--eta", "0.9", "--ed", "0.02", "--mu",
                          "0.3"});
  CHECK(overridden.out == expected.out);

  CHECK(invoke({"rate", "--config", scratch("missing.json").string()}).status == 2);
  const auto bad = scratch("bad.json");
  {
    std::ofstream out(bad);
    out << "{not json";
  }
  CHECK(invoke({"rate", "--config", bad.string()}).status == 2);
}
