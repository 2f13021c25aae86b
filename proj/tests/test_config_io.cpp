#include "catch_amalgamated.hpp"

#include "support.hpp"

using namespace citesim;
using namespace testing;

namespace {

std::string error_of(const Json& j) {
  try {
    sim_config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("configs round-trip through JSON") {
  SimConfig c;
  c.master_seed = 99;
  c.overlap = OverlapMode::OwnFraction;
  c.pairing = PairingPolicy::RoundRobin;
  c.dists.men.beta_skew = 4;
  c.cds = CdsConfig{};
  c.cds->men.fraction = 0.4;
  c.cds->men.gamma_mean = 0.01;
  const auto back = sim_config_from_json(Json::parse(to_json(c).dump()));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.dists == c.dists);
  CHECK(back.cds == c.cds);
}

TEST_CASE("missing keys keep their defaults") {
  const auto c = sim_config_from_json(Json::parse(R"({"years": 5, "dists": {"men": {"beta_mean": 0.7}}})"));
  CHECK(c.years == 5);
  CHECK(c.dists.men.beta_mean == 0.7);
  CHECK(c.dists.men.alpha_mean == 0.45);
  CHECK(c.meetings_per_year == 10);
  CHECK_FALSE(c.cds.has_value());
}

TEST_CASE("schema violations name the offending key") {
  CHECK(error_of(Json::parse(R"({"yeers": 5})")) == "/yeers: unknown key");
  CHECK(error_of(Json::parse(R"({"dists": {"men": {"beta": 1}}})")) == "/dists/men/beta: unknown key");
  CHECK(error_of(Json::parse(R"({"years": "ten"})")) == "/years: expected an integer");
  CHECK(error_of(Json::parse(R"({"years": 2.5})")) == "/years: expected an integer");
  CHECK(error_of(Json::parse(R"({"list_length": -3})")) == "/list_length: expected a non-negative integer");
  CHECK(error_of(Json::parse(R"({"diffusion": {"mu": "x"}})")) == "/diffusion/mu: expected a number");
  CHECK(error_of(Json::parse(R"({"overlap": "cosine"})")).starts_with("/overlap:"));
  CHECK(error_of(Json::parse(R"({"cds": {"men": {"fraction": true}}})")) == "/cds/men/fraction: expected a number");
  CHECK(error_of(Json::parse(R"([1, 2])")) == "/: expected an object");
}

TEST_CASE("bundled default config equals the built-in defaults") {
  const auto path = std::filesystem::path(__FILE__).parent_path().parent_path() / "configs" / "default_sim.json";
  const auto c = sim_config_from_json(read_json_file(path));
  CHECK(to_json(c) == to_json(SimConfig{}));
}

TEST_CASE("generator parameters round-trip") {
  GeneratorParams p;
  p.n_authors = 1234;
  p.gender_assortativity = 0.3;
  const auto back = generator_params_from_json(to_json(p));
  CHECK(to_json(back) == to_json(p));
  CHECK_THROWS_AS(generator_params_from_json(Json::parse(R"({"n": 3})")), ConfigError);
}

TEST_CASE("population snapshots round-trip") {
  const auto g = small_graph();
  const auto r = run_simulation(g, small_config());
  const auto doc = population_to_json(r.agents);
  const auto back = population_from_json(Json::parse(doc.dump()), g);
  REQUIRE(back.size() == r.agents.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].id == r.agents[i].id);
    CHECK(back[i].gender == r.agents[i].gender);
    CHECK(back[i].params == r.agents[i].params);
    CHECK(back[i].estimate == r.agents[i].estimate);
    CHECK(back[i].history == r.agents[i].history);
  }
}

TEST_CASE("experiment specs are validated") {
  auto parse = [](const char* text) { return experiment_spec_from_json(Json::parse(text)); };
  const auto s = parse(R"({"name": "b", "parameter": "beta_mean_men", "values": [0.4, 0.5], "replicates": 2})");
  CHECK(s.kind == ExperimentSpec::Kind::Sweep);
  CHECK(s.values.size() == 2);
  REQUIRE(s.generate.has_value());
  CHECK(s.generate->n_authors == reference_graph_params().n_authors);

  CHECK_THROWS_WITH(parse(R"({"name": "b", "parameter": "delta", "values": [1]})"),
                    Catch::Matchers::ContainsSubstring("/parameter: unknown sweep parameter"));
  CHECK_THROWS_WITH(parse(R"({"name": "b", "parameter": "beta_mean_men", "values": []})"),
                    Catch::Matchers::ContainsSubstring("/values"));
  CHECK_THROWS_WITH(parse(R"({"name": "b", "parameter": "beta_mean_men", "values": [0.5, 0.4]})"),
                    Catch::Matchers::ContainsSubstring("sorted"));
  CHECK_THROWS_WITH(parse(R"({"name": "b", "kind": "baseline", "replicates": 0})"),
                    Catch::Matchers::ContainsSubstring("/replicates"));
  CHECK_THROWS_WITH(parse(R"({"name": "../x", "kind": "baseline"})"), Catch::Matchers::ContainsSubstring("/name"));
  CHECK_THROWS_WITH(parse(R"({"name": "c", "kind": "cds"})"), Catch::Matchers::ContainsSubstring("cds experiments"));
  CHECK_THROWS_WITH(parse(R"({"name": "c", "kind": "baseline", "base": {"years": -1}})"),
                    Catch::Matchers::ContainsSubstring("/base"));
}
