#include "catch_amalgamated.hpp"

#include "support.hpp"

using namespace citesim;
using namespace testing;

TEST_CASE("overcitation is the relative deviation from expectation") {
  CHECK(overcitation(0.3, 0.36) == Catch::Approx(-1.0 / 6.0));
  CHECK(overcitation(0.5, 0.5) == 0.0);
  CHECK(overcitation(1.0, 0.25) == Catch::Approx(3.0));
  CHECK_THROWS_AS(overcitation(0.2, 0.0), MetricError);
}

namespace {

YearRecord record(int year, double fraction, std::vector<AgentYear> agents) {
  YearRecord r;
  r.year = year;
  r.woman_agent_fraction = fraction;
  r.agents = std::move(agents);
  return r;
}

}  // namespace

TEST_CASE("yearly overcitation counts list slots with multiplicity") {
  const auto g = clique("WWMM");
  std::vector<YearRecord> recs;
  recs.push_back(record(0, 0.5, {{0, Gender::Woman, false, {0, 0, 0, 2}, 0}, {1, Gender::Man, false, {2, 3, 2, 1}, 0}}));
  const auto rows = yearly_overcitation(recs, g);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].cited_gender == Gender::Woman);
  CHECK(rows[0].observed == 0.75);
  CHECK(rows[0].overcitation == Catch::Approx(0.5));
  CHECK(rows[1].cited_gender == Gender::Man);
  CHECK(rows[1].overcitation == Catch::Approx(-0.5));
  CHECK(rows[2].overcitation == Catch::Approx(-0.5));
}

TEST_CASE("categories with zero expectation are skipped") {
  const auto g = clique("WWMM");
  std::vector<YearRecord> recs;
  recs.push_back(record(0, 1.0, {{0, Gender::Woman, false, {0, 1}, 0}}));
  const auto rows = yearly_overcitation(recs, g);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].cited_gender == Gender::Woman);
}

TEST_CASE("summaries average per agent, then across agents") {
  std::vector<OvercitationRecord> rows;
  auto add = [&](AgentId id, Gender g, int year, double v) {
    rows.push_back({id, g, year, Gender::Woman, 0, 0, v});
  };
  add(0, Gender::Woman, 0, 0.2);
  add(0, Gender::Woman, 1, 0.4);
  add(0, Gender::Woman, 2, 0.0);
  add(1, Gender::Man, 0, -0.6);
  add(1, Gender::Man, 1, -0.4);
  add(1, Gender::Man, 2, -0.2);
  add(2, Gender::Man, 2, -0.1);
  const auto s = summarize_run(rows);
  CHECK(s.women.n_agents == 1);
  CHECK(s.women.mean == Catch::Approx(0.2));
  CHECK_FALSE(s.women.mean_test.has_value());
  REQUIRE(s.men.agent_means.size() == 2);
  CHECK(s.men.agent_means[0] == Catch::Approx(-0.4));
  CHECK(s.men.agent_means[1] == Catch::Approx(-0.1));
  CHECK(s.men.year_means[2] == Catch::Approx(-0.15));
  REQUIRE(s.men.trend.has_value());
  CHECK(s.all.n_agents == 3);
  CHECK(s.all.year_means[0] == Catch::Approx(-0.2));
  CHECK(s.all.final_year_mean == Catch::Approx((0.0 - 0.2 - 0.1) / 3));
}

TEST_CASE("CDS rates equal to the benchmark give zero overcitation") {
  CdsBenchmark b;
  REQUIRE_NOTHROW(b.validate());
  CHECK(b.expected.ww == 0.067);
  CHECK(b.expected.mw == 0.094);
  CHECK(b.expected.wm == 0.253);
  CHECK(b.expected.mm == 0.586);
  for (double v : cds_overcitation(b.expected).values()) CHECK(v == 0.0);
  const auto o = cds_overcitation({0.134, 0.094, 0.2024, 0.5696});
  CHECK(o.ww == Catch::Approx(1.0));
  CHECK(o.wm == Catch::Approx(-0.2));
  CHECK(o.mm == Catch::Approx(-0.0279863481));
}

TEST_CASE("benchmark and rate validation") {
  CdsBenchmark b;
  b.expected.mm = 0.5;
  CHECK_THROWS_AS(b.validate(), ConfigError);
  CHECK_THROWS_AS(cds_overcitation({-0.1, 0.3, 0.3, 0.3}), MetricError);
}

TEST_CASE("simulation output yields a full overcitation table") {
  const auto g = small_graph();
  const auto c = small_config();
  const auto r = run_simulation(g, c);
  const auto rows = yearly_overcitation(r.records, g);
  std::size_t agent_years = 0;
  for (const auto& rec : r.records) agent_years += rec.agents.size();
  CHECK(rows.size() == 2 * agent_years);
  for (const auto& row : rows) {
    REQUIRE(row.observed >= 0.0);
    REQUIRE(row.observed <= 1.0);
    REQUIRE(row.overcitation >= -1.0);
  }
}
