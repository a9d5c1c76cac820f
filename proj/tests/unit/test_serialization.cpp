#include <doctest.h>

#include <sstream>

#include "elqkd/serialization.hpp"

using namespace elqkd;

TEST_CASE("fixed nine-decimal formatting") {
  CHECK(format_fixed9(1.0) == "1.000000000");
  CHECK(format_fixed9(0.1100278644383595) == "0.110027864");
  CHECK(format_fixed9(0.5) == "0.500000000");
}

TEST_CASE("curve CSV layout") {
  ThresholdCurve curve{CurveTag::coherent, {}, GridSpec{}};
  curve.points.push_back({Probability{0.75}, Probability{0.0123456789}, CurveTag::coherent});
  curve.points.push_back({Probability{1.0}, Probability{0.05}, CurveTag::coherent});
  std::ostringstream out;
  write_curves_csv(out, std::span(&curve, 1));
  CHECK(out.str() ==
        "model,eta,e_d_max\n"
        "coherent,0.750000000,0.012345679\n"
        "coherent,1.000000000,0.050000000\n");
}

TEST_CASE("curve CSV round-trips within the nine-decimal quantum") {
  std::vector<ThresholdCurve> curves;
  for (auto tag : kAllCurveTags) {
    curves.push_back(sweep_curve(CurveFamily{tag}, GridSpec{0.5, 1.0, 0.01}));
  }
  std::stringstream text;
  write_curves_csv(text, curves);
  const auto rows = read_curves_csv(text);

  std::size_t i = 0;
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      REQUIRE(i < rows.size());
      CHECK(rows[i].model == curve_name(curve.tag));
      CHECK(std::abs(rows[i].eta - p.eta.value()) <= 5e-10);
      CHECK(std::abs(rows[i].e_d_max - p.e_d_max.value()) <= 5e-10);
      ++i;
    }
  }
  CHECK(i == rows.size());
}

TEST_CASE("curve CSV reader rejects malformed input") {
  std::istringstream bad_header("model,eta\n");
  CHECK_THROWS_AS(read_curves_csv(bad_header), std::runtime_error);
  std::istringstream bad_row("model,eta,e_d_max\ncoherent,abc,0.1\n");
  CHECK_THROWS_AS(read_curves_csv(bad_row), std::runtime_error);
}

TEST_CASE("batch JSON carries exactly the documented fields") {
  const auto batch = run_trials(SinglePhoton{Probability{0.8}, Probability{0.02}}, NoAdversary{},
                                100'000, 31);
  const auto json = batch_to_json(batch);
  std::vector<std::string> keys;
  for (const auto& [key, value] : json.items()) keys.push_back(key);
  CHECK(keys == std::vector<std::string>{"scenario", "model", "n_pulses", "seed", "n_single",
                                         "n_double", "n_none", "n_single_errors", "q_s", "e_s",
                                         "rate"});

  const auto parsed = Json::parse(json.dump());
  const auto stats = empirical_stats(batch).stats;
  CHECK(parsed["scenario"] == "honest");
  CHECK(parsed["model"] == "single-photon");
  CHECK(parsed["n_pulses"].get<std::uint64_t>() == batch.n_pulses());
  CHECK(parsed["seed"].get<std::uint64_t>() == 31);
  CHECK(parsed["n_single"].get<std::uint64_t>() == batch.sifted.n_single);
  CHECK(parsed["q_s"].get<double>() == stats.q_s.value());
  CHECK(parsed["e_s"].get<double>() == stats.e_s.value());
  CHECK(parsed["rate"].get<double>() == key_rate_single_click(stats).rate);
}

TEST_CASE("large seeds survive JSON") {
  TrialBatch batch;
  batch.seed = 0xFFFFFFFFFFFFFFFFull;
  batch.sifted.n_single = 1;
  CHECK(Json::parse(batch_to_json(batch).dump())["seed"].get<std::uint64_t>() == batch.seed);
}

TEST_CASE("breakdown JSON") {
  const auto b = key_rate(CoherentDecoy{0.5, Probability{0.8}, Probability{0.02}});
  const auto json = Json::parse(breakdown_to_json(b, "coherent").dump());
  CHECK(json["rate"].get<double>() == b.rate);
  CHECK(json["operational_rate"].get<double>() == b.rate);
  CHECK(json["p_1"].get<double>() == b.p_1->value());

  const auto single = breakdown_to_json(key_rate(SinglePhoton{Probability{0.4}, Probability{0.1}}),
                                        "single-photon");
  CHECK(single["p_1"].is_null());
  CHECK(single["operational_rate"].get<double>() == 0.0);
  CHECK(single["rate"].get<double>() < 0.0);
}

TEST_CASE("flat CSV from a JSON object") {
  Json object;
  object["name"] = "x";
  object["count"] = std::uint64_t{3};
  object["value"] = 0.25;
  object["missing"] = nullptr;
  object["ok"] = true;
  std::ostringstream out;
  write_flat_csv(out, object);
  CHECK(out.str() == "name,count,value,missing,ok\nx,3,0.250000000,,true\n");
}
