#pragma once

// Overcitation of each gender relative to its expected share, per agent and
// year, plus the four-category comparison against reported benchmark rates.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "citesim/error.hpp"
#include "citesim/graph.hpp"
#include "citesim/simulation.hpp"
#include "citesim/stats.hpp"

namespace citesim {

/// Relative deviation (obs - exp) / exp.
inline double overcitation(double observed, double expected) {
  if (!(expected > 0.0)) throw MetricError("overcitation undefined for expected proportion " + std::to_string(expected));
  return (observed - expected) / expected;
}

struct OvercitationRecord {
  AgentId agent_id = 0;
  Gender agent_gender = Gender::Woman;
  int year = 0;
  Gender cited_gender = Gender::Woman;
  double observed = 0.0;
  double expected = 0.0;
  double overcitation = 0.0;
};

/// One record per agent, year and cited gender with a positive expected
/// share. Observed shares count reference-list slots with multiplicity.
inline std::vector<OvercitationRecord> yearly_overcitation(const std::vector<YearRecord>& records,
                                                           const CoauthorGraph& graph) {
  std::vector<OvercitationRecord> out;
  for (const auto& rec : records) {
    const double exp_w = expected_woman_fraction(rec);
    for (const auto& a : rec.agents) {
      if (a.references.empty()) throw MetricError("empty reference list");
      std::size_t women = 0;
      for (auto id : a.references) women += graph.gender(id) == Gender::Woman;
      const double obs_w = static_cast<double>(women) / static_cast<double>(a.references.size());
      for (Gender cited : {Gender::Woman, Gender::Man}) {
        const double obs = cited == Gender::Woman ? obs_w : 1.0 - obs_w;
        const double exp = cited == Gender::Woman ? exp_w : 1.0 - exp_w;
        if (!(exp > 0.0)) continue;
        out.push_back({a.id, a.gender, rec.year, cited, obs, exp, overcitation(obs, exp)});
      }
    }
  }
  return out;
}

/// Overcitation statistics for one cited gender within a group of citers.
struct GroupSummary {
  std::size_t n_agents = 0;
  std::vector<double> agent_means;     // per agent, averaged over its years
  double mean = 0.0;                   // mean of agent_means
  double standard_error = 0.0;
  std::optional<stats::TestResult> mean_test;  // one-sample t vs 0
  std::vector<double> year_means;      // per year, averaged over agents
  std::optional<stats::TestResult> trend;      // OLS of year_means on year
  double final_year_mean = 0.0;
};

/// `citer` empty = all agents.
inline GroupSummary summarize(const std::vector<OvercitationRecord>& rows, Gender cited,
                              std::optional<Gender> citer = std::nullopt) {
  std::map<AgentId, std::pair<double, std::size_t>> per_agent;
  std::map<int, std::pair<double, std::size_t>> per_year;
  for (const auto& r : rows) {
    if (r.cited_gender != cited || (citer && r.agent_gender != *citer)) continue;
    auto& a = per_agent[r.agent_id];
    a.first += r.overcitation;
    ++a.second;
    auto& y = per_year[r.year];
    y.first += r.overcitation;
    ++y.second;
  }
  GroupSummary s;
  s.n_agents = per_agent.size();
  for (auto& [id, acc] : per_agent) s.agent_means.push_back(acc.first / static_cast<double>(acc.second));
  std::vector<double> years;
  for (auto& [y, acc] : per_year) {
    years.push_back(static_cast<double>(y));
    s.year_means.push_back(acc.first / static_cast<double>(acc.second));
  }
  if (s.agent_means.empty()) return s;
  s.mean = stats::mean(s.agent_means);
  s.standard_error = stats::standard_error(s.agent_means);
  try {
    s.mean_test = stats::one_sample_t_test(s.agent_means, 0.0);
  } catch (const TestError&) {
  }
  try {
    s.trend = stats::ols_trend(years, s.year_means);
  } catch (const TestError&) {
  }
  s.final_year_mean = s.year_means.back();
  return s;
}

/// Woman-overcitation summaries for all citers and each citer gender.
struct RunSummary {
  GroupSummary all, women, men;
  const GroupSummary& of(Gender citer) const { return citer == Gender::Woman ? women : men; }
};

inline RunSummary summarize_run(const std::vector<OvercitationRecord>& rows, Gender cited = Gender::Woman) {
  return {summarize(rows, cited), summarize(rows, cited, Gender::Woman), summarize(rows, cited, Gender::Man)};
}

/// Rates for papers with woman/man first and last authors: ww, mw, wm, mm.
struct CdsRates {
  double ww = 0.0, mw = 0.0, wm = 0.0, mm = 0.0;

  std::array<double, 4> values() const { return {ww, mw, wm, mm}; }
  double sum() const { return ww + mw + wm + mm; }
};

struct CdsBenchmark {
  CdsRates expected{0.067, 0.094, 0.253, 0.586};

  void validate() const {
    if (std::abs(expected.sum() - 1.0) > 1e-9) throw ConfigError("benchmark rates must sum to 1");
    for (double v : expected.values())
      if (v < 0.0) throw ConfigError("benchmark rates must be non-negative");
  }
};

inline CdsRates cds_overcitation(const CdsRates& reported, const CdsBenchmark& benchmark = {}) {
  for (double v : reported.values())
    if (v < 0.0) throw MetricError("reported rates must be non-negative");
  const auto& e = benchmark.expected;
  return {overcitation(reported.ww, e.ww), overcitation(reported.mw, e.mw), overcitation(reported.wm, e.wm),
          overcitation(reported.mm, e.mm)};
}

}  // namespace citesim
