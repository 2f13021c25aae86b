#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <utility>
#include <span>
#include <vector>

#include "citesim/error.hpp"
#include "citesim/graph.hpp"
#include "citesim/rng.hpp"
#include "citesim/walks.hpp"

namespace citesim {

using AgentId = std::uint32_t;

struct AgentParams {
  double alpha = 0.5;  // estimate-composition bias
  double beta = 0.5;   // sampling bias
  double gamma = 0.0;  // similarity threshold
  double zeta = 0.1;   // learning fidelity

  bool operator==(const AgentParams&) const = default;
};

/// Parameter distribution for one gender. beta_skew != 0 switches beta to a
/// skew-normal with location beta_mean and scale beta_sd.
struct GenderDists {
  double alpha_mean = 0.5, alpha_sd = 0.0;
  double beta_mean = 0.5, beta_sd = 0.0, beta_skew = 0.0;
  double gamma_mean = 0.0, gamma_sd = 0.0;
  double zeta_mean = 0.1;

  bool operator==(const GenderDists&) const = default;
};

struct ParamDistributions {
  GenderDists women{.alpha_mean = 0.51, .alpha_sd = 0.01,
                    .beta_mean = 0.6, .beta_sd = 0.1, .beta_skew = 0.0,
                    .gamma_mean = 0.04, .gamma_sd = 0.005,
                    .zeta_mean = 0.1};
  GenderDists men{.alpha_mean = 0.45, .alpha_sd = 0.01,
                  .beta_mean = 0.44, .beta_sd = 0.1, .beta_skew = 0.0,
                  .gamma_mean = 0.06, .gamma_sd = 0.005,
                  .zeta_mean = 0.1};

  const GenderDists& of(Gender g) const { return g == Gender::Woman ? women : men; }
  GenderDists& of(Gender g) { return g == Gender::Woman ? women : men; }

  bool operator==(const ParamDistributions&) const = default;
};

inline void validate(const GenderDists& d) {
  if (d.alpha_sd < 0 || d.beta_sd < 0 || d.gamma_sd < 0) throw ConfigError("standard deviations must be >= 0");
  if (!(d.zeta_mean > 0)) throw ConfigError("zeta_mean must be positive");
}

inline constexpr double kMinBias = 0.001;
inline constexpr double kMaxBias = 0.999;

/// Draws alpha, beta, gamma (in that order) and clamps them into range.
inline AgentParams sample_params(Gender gender, const ParamDistributions& dists, Rng& rng) {
  const auto& d = dists.of(gender);
  AgentParams p;
  p.alpha = std::clamp(rng.normal(d.alpha_mean, d.alpha_sd), kMinBias, kMaxBias);
  const double beta = d.beta_skew != 0.0 ? rng.skew_normal(d.beta_mean, d.beta_sd, d.beta_skew)
                                         : rng.normal(d.beta_mean, d.beta_sd);
  p.beta = std::clamp(beta, kMinBias, kMaxBias);
  p.gamma = std::clamp(rng.normal(d.gamma_mean, d.gamma_sd), 0.0, 1.0);
  p.zeta = d.zeta_mean;
  return p;
}

/// Running multiset of authors an agent has discussed or cited, kept as
/// (author, count) pairs in ascending author order.
class History {
 public:
  using Entry = std::pair<AuthorId, std::uint64_t>;

  void add(std::span<const AuthorId> authors) {
    std::vector<AuthorId> fresh;
    for (auto a : authors) {
      auto it = find(a);
      if (it != counts_.end() && it->first == a)
        ++it->second;
      else
        fresh.push_back(a);
    }
    total_ += authors.size();
    if (fresh.empty()) return;
    std::sort(fresh.begin(), fresh.end());
    std::vector<Entry> added;
    for (std::size_t i = 0; i < fresh.size();) {
      std::size_t j = i;
      while (j < fresh.size() && fresh[j] == fresh[i]) ++j;
      added.emplace_back(fresh[i], j - i);
      i = j;
    }
    std::vector<Entry> merged;
    merged.reserve(counts_.size() + added.size());
    std::merge(counts_.begin(), counts_.end(), added.begin(), added.end(), std::back_inserter(merged));
    counts_ = std::move(merged);
  }
  std::uint64_t frequency(AuthorId a) const {
    auto it = std::lower_bound(counts_.begin(), counts_.end(), a,
                               [](const Entry& e, AuthorId id) { return e.first < id; });
    return it == counts_.end() || it->first != a ? 0 : it->second;
  }
  std::uint64_t total() const { return total_; }
  std::size_t distinct() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  const std::vector<Entry>& counts() const { return counts_; }

  bool operator==(const History&) const = default;

 private:
  std::vector<Entry>::iterator find(AuthorId a) {
    return std::lower_bound(counts_.begin(), counts_.end(), a,
                            [](const Entry& e, AuthorId id) { return e.first < id; });
  }

  std::vector<Entry> counts_;
  std::uint64_t total_ = 0;
};

struct Agent {
  AgentId id = 0;
  Gender gender = Gender::Woman;
  AgentParams params;
  Estimate estimate;
  History history;
  bool cds_adopter = false;
};

/// Biased diffusive walk from a uniform start with bias alpha; the visited
/// set plus its induced edges becomes the estimate.
inline Estimate init_estimate(const CoauthorGraph& graph, const AgentParams& params,
                              const DiffusionParams& diffusion, Rng& rng) {
  if (graph.n_authors() == 0) throw StateError("empty graph");
  const auto start = static_cast<AuthorId>(rng.index(graph.n_authors()));
  auto visited = diffusive_walk(graph, start, WalkBias{params.alpha}, diffusion, rng);
  return Estimate::induce(graph, std::move(visited));
}

/// Seeds the citation history with one self-emitted list.
inline void seed_history(Agent& agent, std::size_t list_length, Rng& rng) {
  const auto list = citation_walk(agent.estimate, WalkBias{agent.params.beta}, list_length, rng);
  agent.history.add(list);
}

enum class OverlapMode {
  Jaccard,      // |A ∩ B| / |A ∪ B|
  OwnFraction,  // |A ∩ B| / |A|, from the first agent's side
};

/// Share of distinct authors common to two citation histories.
inline double history_overlap(const History& a, const History& b, OverlapMode mode = OverlapMode::Jaccard) {
  std::size_t common = 0;
  auto ia = a.counts().begin(), ib = b.counts().begin();
  while (ia != a.counts().end() && ib != b.counts().end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t denom =
      mode == OverlapMode::Jaccard ? a.distinct() + b.distinct() - common : a.distinct();
  return denom == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(denom);
}

inline double history_overlap(const Agent& a, const Agent& b, OverlapMode mode = OverlapMode::Jaccard) {
  return history_overlap(a.history, b.history, mode);
}

}  // namespace citesim
