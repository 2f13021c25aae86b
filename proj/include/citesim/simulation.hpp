#pragma once

// Yearly loop: meeting rounds with gated learning, a reference list per
// agent at year end, then growth of the population with new women agents.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "citesim/agents.hpp"
#include "citesim/error.hpp"
#include "citesim/graph.hpp"
#include "citesim/learning.hpp"
#include "citesim/rng.hpp"
#include "citesim/walks.hpp"

namespace citesim {

enum class PairingPolicy {
  Random,      // each agent initiates a meeting with a uniform distinct partner
  RoundRobin,  // in round r agent i meets agent (i + 1 + r) mod N
};

/// Parameters assigned to agents that adopt a citation diversity statement.
/// `fraction` is the share of that gender's agents who adopt; gamma is only
/// overridden when gamma_mean is set.
struct CdsAdoption {
  double fraction = 0.0;
  double beta_mean = 0.6;
  double beta_sd = 0.1;
  double beta_skew = 10.0;
  std::optional<double> gamma_mean;
  double gamma_sd = 0.005;

  bool operator==(const CdsAdoption&) const = default;
};

struct CdsConfig {
  CdsAdoption women;
  CdsAdoption men;

  const CdsAdoption& of(Gender g) const { return g == Gender::Woman ? women : men; }
  bool operator==(const CdsConfig&) const = default;
};

struct SimConfig {
  int years = 23;
  int meetings_per_year = 10;
  std::size_t list_length = 70;
  std::size_t n_initial_agents = 200;
  double initial_woman_fraction = 0.36;
  double target_final_woman_fraction = 0.50;
  std::size_t final_agent_count = 256;
  DiffusionParams diffusion;
  ParamDistributions dists;
  double learning_threshold = 0.1;
  std::uint64_t master_seed = 0;
  OverlapMode overlap = OverlapMode::Jaccard;
  PairingPolicy pairing = PairingPolicy::Random;
  std::optional<CdsConfig> cds;

  std::size_t initial_women() const {
    return static_cast<std::size_t>(std::llround(initial_woman_fraction * static_cast<double>(n_initial_agents)));
  }
};

inline bool operator==(const DiffusionParams& a, const DiffusionParams& b) {
  return a.mu == b.mu && a.max_step == b.max_step && a.length == b.length;
}

inline void validate(const SimConfig& c) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (c.years < 0) throw ConfigError("years must be >= 0");
  if (c.meetings_per_year < 0) throw ConfigError("meetings_per_year must be >= 0");
  if (c.list_length < 1) throw ConfigError("list_length must be >= 1");
  if (c.n_initial_agents < 2) throw ConfigError("n_initial_agents must be >= 2");
  if (c.final_agent_count < c.n_initial_agents) throw ConfigError("final_agent_count must be >= n_initial_agents");
  if (!in_unit(c.initial_woman_fraction)) throw ConfigError("initial_woman_fraction must lie in [0, 1]");
  if (!in_unit(c.target_final_woman_fraction)) throw ConfigError("target_final_woman_fraction must lie in [0, 1]");
  if (!(c.diffusion.mu > 0.0)) throw ConfigError("diffusion.mu must be positive");
  if (c.diffusion.max_step < 1) throw ConfigError("diffusion.d must be >= 1");
  if (c.diffusion.length < 1) throw ConfigError("diffusion.length must be >= 1");
  if (!(c.learning_threshold >= 0.0)) throw ConfigError("learning_threshold must be >= 0");
  validate(c.dists.women);
  validate(c.dists.men);
  if (c.years == 0 && c.final_agent_count != c.n_initial_agents)
    throw ConfigError("population growth requires years > 0");
  // Growth adds women only, so the final fraction is implied by the counts.
  const double final_women = static_cast<double>(c.initial_women() + (c.final_agent_count - c.n_initial_agents));
  const double implied = final_women / static_cast<double>(c.final_agent_count);
  if (std::abs(implied - c.target_final_woman_fraction) > 1.0 / static_cast<double>(c.final_agent_count) + 1e-12)
    throw ConfigError("target_final_woman_fraction is inconsistent with the agent counts (implied " +
                      std::to_string(implied) + ")");
  if (c.cds) {
    for (const auto* a : {&c.cds->women, &c.cds->men}) {
      if (!in_unit(a->fraction)) throw ConfigError("cds adoption fraction must lie in [0, 1]");
      if (a->beta_sd < 0 || a->gamma_sd < 0) throw ConfigError("cds standard deviations must be >= 0");
    }
  }
}

/// New women per year: cumulative totals follow floor(total * (y+1) / years),
/// so per-year counts differ by at most one and sum to the total.
inline std::vector<std::size_t> growth_schedule(const SimConfig& c) {
  std::vector<std::size_t> out(static_cast<std::size_t>(std::max(c.years, 0)), 0);
  if (c.years <= 0) return out;
  const std::size_t total = c.final_agent_count - c.n_initial_agents;
  const auto years = static_cast<std::size_t>(c.years);
  std::size_t prev = 0;
  for (std::size_t y = 0; y < years; ++y) {
    const std::size_t cum = total * (y + 1) / years;
    out[y] = cum - prev;
    prev = cum;
  }
  return out;
}

struct AgentYear {
  AgentId id = 0;
  Gender gender = Gender::Woman;
  bool cds_adopter = false;
  std::vector<AuthorId> references;
  std::size_t n_learned = 0;
};

struct YearRecord {
  int year = 0;
  double woman_agent_fraction = 0.0;
  std::vector<AgentYear> agents;  // ascending id
};

struct SimResult {
  std::vector<YearRecord> records;
  std::vector<Agent> agents;  // final population
};

/// Woman share of the agent population when the year's papers were written.
inline double expected_woman_fraction(const YearRecord& record) { return record.woman_agent_fraction; }

namespace detail {

enum StreamTag : std::uint64_t { kInitStream = 1, kRoundStream = 2, kPaperStream = 3, kAdoptStream = 4 };

inline double woman_fraction(const std::vector<Agent>& agents) {
  if (agents.empty()) return 0.0;
  const auto women = std::count_if(agents.begin(), agents.end(), [](const Agent& a) { return a.gender == Gender::Woman; });
  return static_cast<double>(women) / static_cast<double>(agents.size());
}

inline Agent make_agent(const CoauthorGraph& graph, const SimConfig& config, AgentId id, Gender gender,
                        std::optional<bool> adopter) {
  Rng rng(derive_seed({config.master_seed, kInitStream, id}));
  Agent agent;
  agent.id = id;
  agent.gender = gender;
  if (!adopter) adopter = config.cds && rng.bernoulli(config.cds->of(gender).fraction);
  agent.cds_adopter = *adopter;

  ParamDistributions dists = config.dists;
  if (agent.cds_adopter) {
    const auto& cds = config.cds->of(gender);
    auto& d = dists.of(gender);
    d.beta_mean = cds.beta_mean;
    d.beta_sd = cds.beta_sd;
    d.beta_skew = cds.beta_skew;
    if (cds.gamma_mean) {
      d.gamma_mean = *cds.gamma_mean;
      d.gamma_sd = cds.gamma_sd;
    }
  }
  agent.params = sample_params(gender, dists, rng);
  agent.estimate = init_estimate(graph, agent.params, config.diffusion, rng);
  seed_history(agent, config.list_length, rng);
  return agent;
}

/// Exact adopter counts within each gender of the initial population.
inline std::vector<bool> initial_adopters(const SimConfig& config, const std::vector<Gender>& genders) {
  std::vector<bool> out(genders.size(), false);
  if (!config.cds) return out;
  for (Gender g : {Gender::Woman, Gender::Man}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < genders.size(); ++i)
      if (genders[i] == g) members.push_back(i);
    Rng rng(derive_seed({config.master_seed, kAdoptStream, static_cast<std::uint64_t>(g)}));
    for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng.index(i)]);
    const auto k = static_cast<std::size_t>(std::llround(config.cds->of(g).fraction * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < k && i < members.size(); ++i) out[members[i]] = true;
  }
  return out;
}

}  // namespace detail

/// Builds the initial population: the first round(n * fraction) ids are women.
inline std::vector<Agent> initial_population(const CoauthorGraph& graph, const SimConfig& config) {
  std::vector<Gender> genders(config.n_initial_agents, Gender::Man);
  std::fill_n(genders.begin(), std::min(config.initial_women(), genders.size()), Gender::Woman);
  const auto adopters = detail::initial_adopters(config, genders);
  std::vector<Agent> agents;
  agents.reserve(config.final_agent_count);
  for (std::size_t i = 0; i < genders.size(); ++i)
    agents.push_back(detail::make_agent(graph, config, static_cast<AgentId>(i), genders[i], adopters[i]));
  return agents;
}

/// Runs the full schedule. Output depends only on (graph, config); every
/// agent draws from streams derived from (master_seed, agent id, year, round).
inline SimResult run_simulation(const CoauthorGraph& graph, const SimConfig& config) {
  validate(config);
  SimResult result;
  auto& agents = result.agents;
  agents = initial_population(graph, config);
  const auto growth = growth_schedule(config);
  const auto len = config.list_length;

  for (int year = 0; year < config.years; ++year) {
    std::vector<std::size_t> learned(agents.size(), 0);
    const std::size_t n = agents.size();

    for (int round = 0; round < config.meetings_per_year; ++round) {
      std::vector<Rng> streams;
      streams.reserve(n);
      for (std::size_t i = 0; i < n; ++i)
        streams.emplace_back(derive_seed({config.master_seed, detail::kRoundStream, i,
                                          static_cast<std::uint64_t>(year), static_cast<std::uint64_t>(round)}));

      for (std::size_t i = 0; i < n; ++i) {
        std::size_t j;
        if (config.pairing == PairingPolicy::Random) {
          j = streams[i].index(n - 1);
          if (j >= i) ++j;
        } else {
          j = (i + 1 + static_cast<std::size_t>(round) % (n - 1)) % n;
        }
        Agent& a = agents[i];
        Agent& b = agents[j];

        // Gate on pre-meeting histories.
        const double overlap_ab = history_overlap(a, b, config.overlap);
        const double overlap_ba =
            config.overlap == OverlapMode::Jaccard ? overlap_ab : history_overlap(b, a, config.overlap);

        const auto list_a = citation_walk(a.estimate, WalkBias{a.params.beta}, len, streams[i]);
        a.history.add(list_a);
        const auto list_b = citation_walk(b.estimate, WalkBias{b.params.beta}, len, streams[j]);
        b.history.add(list_b);

        const std::size_t size_a = a.estimate.size(), size_b = b.estimate.size();
        if (overlap_ab > a.params.gamma)
          learned[i] += apply_learning(a, list_b, graph, config.learning_threshold).n_learned;
        if (overlap_ba > b.params.gamma)
          learned[j] += apply_learning(b, list_a, graph, config.learning_threshold).n_learned;
        if (a.estimate.size() != size_a || b.estimate.size() != size_b)
          throw StateError("learning changed an estimate's size");
      }
    }

    YearRecord record;
    record.year = year;
    record.woman_agent_fraction = detail::woman_fraction(agents);
    record.agents.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Agent& a = agents[i];
      Rng rng(derive_seed({config.master_seed, detail::kPaperStream, i, static_cast<std::uint64_t>(year)}));
      auto refs = citation_walk(a.estimate, WalkBias{a.params.beta}, len, rng);
      a.history.add(refs);
      record.agents.push_back({a.id, a.gender, a.cds_adopter, std::move(refs), learned[i]});
    }
    result.records.push_back(std::move(record));

    for (std::size_t k = 0; k < growth[static_cast<std::size_t>(year)]; ++k) {
      const auto id = static_cast<AgentId>(agents.size());
      agents.push_back(detail::make_agent(graph, config, id, Gender::Woman, std::nullopt));
    }
  }
  return result;
}

}  // namespace citesim
