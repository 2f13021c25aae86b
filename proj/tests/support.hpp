#pragma once

#include <string>
#include <vector>

#include "citesim/citesim.hpp"

namespace testing {

using namespace citesim;

inline std::vector<Gender> genders_from(const std::string& codes) {
  std::vector<Gender> out;
  for (char c : codes) out.push_back(c == 'W' ? Gender::Woman : Gender::Man);
  return out;
}

/// Hub 0 joined to every other node; genders given per node.
inline CoauthorGraph star(const std::string& codes) {
  std::vector<Edge> edges;
  for (AuthorId v = 1; v < codes.size(); ++v) edges.emplace_back(0, v);
  return CoauthorGraph(genders_from(codes), edges);
}

inline CoauthorGraph clique(const std::string& codes) {
  std::vector<Edge> edges;
  for (AuthorId u = 0; u < codes.size(); ++u)
    for (AuthorId v = u + 1; v < codes.size(); ++v) edges.emplace_back(u, v);
  return CoauthorGraph(genders_from(codes), edges);
}

inline CoauthorGraph small_graph(std::uint64_t seed = 3, std::size_t n = 1500) {
  GeneratorParams p;
  p.n_authors = n;
  p.woman_fraction = 0.3;
  p.seed = seed;
  return generate_synthetic(p);
}

/// A short run that still exercises growth, meetings and learning.
inline SimConfig small_config(std::uint64_t seed = 7) {
  SimConfig c;
  c.years = 4;
  c.meetings_per_year = 3;
  c.list_length = 30;
  c.n_initial_agents = 20;
  c.initial_woman_fraction = 0.35;   // 7 women
  c.final_agent_count = 24;
  c.target_final_woman_fraction = 11.0 / 24.0;
  c.diffusion.length = 150;
  c.master_seed = seed;
  return c;
}

}  // namespace testing
