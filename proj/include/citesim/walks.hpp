#pragma once

// Gender-biased random walks: the diffusive Pareto-step walk used to build
// network estimates and the unit-step walk that produces discussion and
// reference lists.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citesim/error.hpp"
#include "citesim/graph.hpp"
#include "citesim/rng.hpp"

namespace citesim {

/// Probability weight given to women at each step (alpha or beta).
struct WalkBias {
  double p_woman = 0.5;
};

struct DiffusionParams {
  double mu = 3.0;          // Pareto decay rate
  int max_step = 3;         // d
  std::size_t length = 500; // recorded positions
};

/// Anything that exposes sorted neighbor rows and a gender per node.
template <class G>
concept WalkableGraph = requires(const G& g, std::uint32_t u) {
  { g.neighbors(u) } -> std::convertible_to<std::span<const std::uint32_t>>;
  { g.gender(u) } -> std::convertible_to<Gender>;
};

/// One step to a neighbor of `current`. Women receive weight p, men 1 - p,
/// normalized over the neighborhood. A single-gender neighborhood is sampled
/// uniformly whatever the bias.
template <WalkableGraph G>
std::uint32_t biased_step(const G& graph, std::uint32_t current, WalkBias bias, Rng& rng) {
  const std::span<const std::uint32_t> nbrs = graph.neighbors(current);
  if (nbrs.empty()) throw WalkError("walk reached isolated node " + std::to_string(current));
  std::size_t women = 0;
  for (auto v : nbrs) women += graph.gender(v) == Gender::Woman;
  const std::size_t men = nbrs.size() - women;
  if (women == 0 || men == 0) return nbrs[rng.index(nbrs.size())];

  const double p = bias.p_woman;
  const double z = static_cast<double>(women) * p + static_cast<double>(men) * (1.0 - p);
  // Choose the gender first, then a uniform member of that gender.
  const bool pick_woman = rng.uniform() * z < static_cast<double>(women) * p;
  std::size_t k = rng.index(pick_woman ? women : men);
  const Gender want = pick_woman ? Gender::Woman : Gender::Man;
  for (auto v : nbrs)
    if (graph.gender(v) == want && k-- == 0) return v;
  return nbrs.back();  // unreachable
}

/// Step size on {1..d} with P(s) proportional to s^-(mu+1).
inline int sample_step_size(const DiffusionParams& params, Rng& rng) {
  const int d = std::max(1, params.max_step);
  double z = 0.0;
  for (int s = 1; s <= d; ++s) z += std::pow(static_cast<double>(s), -(params.mu + 1.0));
  double u = rng.uniform() * z;
  for (int s = 1; s <= d; ++s) {
    u -= std::pow(static_cast<double>(s), -(params.mu + 1.0));
    if (u < 0.0) return s;
  }
  return d;
}

/// Records `params.length` landing positions. Each position is reached by
/// drawing a step size s and chaining s biased steps; intermediate nodes are
/// not recorded and the start is not recorded.
template <WalkableGraph G>
std::vector<std::uint32_t> diffusive_walk(const G& graph, std::uint32_t start, WalkBias bias,
                                          const DiffusionParams& params, Rng& rng) {
  std::vector<std::uint32_t> out;
  out.reserve(params.length);
  auto current = start;
  while (out.size() < params.length) {
    const int s = sample_step_size(params, rng);
    for (int i = 0; i < s; ++i) current = biased_step(graph, current, bias, rng);
    out.push_back(current);
  }
  return out;
}

/// An agent's view of the field: a node subset of C with the induced edges.
/// Nodes are held in ascending AuthorId order and addressed by local index.
class Estimate {
 public:
  Estimate() = default;

  /// Induces the subgraph of `graph` on `nodes` (duplicates ignored).
  static Estimate induce(const CoauthorGraph& graph, std::vector<AuthorId> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    Estimate e;
    e.nodes_ = std::move(nodes);
    e.offsets_.assign(e.nodes_.size() + 1, 0);
    e.genders_.reserve(e.nodes_.size());
    IdSlots slots(graph.n_authors());
    slots.assign(e.nodes_);
    for (std::size_t i = 0; i < e.nodes_.size(); ++i) {
      const auto u = e.nodes_[i];
      e.genders_.push_back(graph.gender(u));
      for (auto v : graph.neighbors(u))
        if (auto j = slots[v]; j >= 0) e.adjacency_.push_back(static_cast<std::uint32_t>(j));
      e.offsets_[i + 1] = e.adjacency_.size();
    }
    slots.clear(e.nodes_);
    return e;
  }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<AuthorId>& nodes() const { return nodes_; }
  AuthorId node(std::uint32_t local) const { return nodes_[local]; }

  std::optional<std::uint32_t> local_index(AuthorId id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end() || *it != id) return std::nullopt;
    return static_cast<std::uint32_t>(it - nodes_.begin());
  }
  bool contains(AuthorId id) const { return local_index(id).has_value(); }

  std::span<const std::uint32_t> neighbors(std::uint32_t local) const {
    return {adjacency_.data() + offsets_[local], offsets_[local + 1] - offsets_[local]};
  }
  Gender gender(std::uint32_t local) const { return genders_[local]; }
  std::size_t n_edges() const { return adjacency_.size() / 2; }

  bool operator==(const Estimate&) const = default;

 private:
  std::vector<AuthorId> nodes_;
  std::vector<Gender> genders_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> adjacency_;
};

/// Unit-step biased walk on an estimate. The start node is uniform and is
/// the first entry; a node without neighbors inside the estimate triggers a
/// uniform teleport, which is recorded like any other step. Returns global
/// AuthorIds with multiplicity.
inline std::vector<AuthorId> citation_walk(const Estimate& estimate, WalkBias bias, std::size_t list_length,
                                           Rng& rng) {
  if (estimate.empty()) throw StateError("citation walk on an empty estimate");
  std::vector<AuthorId> out;
  out.reserve(list_length);
  if (list_length == 0) return out;
  auto current = static_cast<std::uint32_t>(rng.index(estimate.size()));
  out.push_back(estimate.node(current));
  while (out.size() < list_length) {
    if (estimate.neighbors(current).empty())
      current = static_cast<std::uint32_t>(rng.index(estimate.size()));
    else
      current = biased_step(estimate, current, bias, rng);
    out.push_back(estimate.node(current));
  }
  return out;
}

}  // namespace citesim
