#pragma once

// Gender-labeled co-authorship graph: construction, synthetic generation,
// edge-list ingestion and deterministic serialization.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "citesim/error.hpp"
#include "citesim/rng.hpp"

namespace citesim {

using AuthorId = std::uint32_t;

enum class Gender : std::uint8_t { Woman, Man };

inline char gender_code(Gender g) { return g == Gender::Woman ? 'W' : 'M'; }

inline std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "W") return Gender::Woman;
  if (s == "M") return Gender::Man;
  return std::nullopt;
}

inline Gender other(Gender g) { return g == Gender::Woman ? Gender::Man : Gender::Woman; }

using Edge = std::pair<AuthorId, AuthorId>;

/// Undirected, binary, loop-free graph with a gender per node. Immutable
/// after construction; adjacency is stored in CSR form with sorted rows.
class CoauthorGraph {
 public:
  CoauthorGraph() = default;

  /// Builds from an edge list over ids 0..genders.size()-1. Edges are
  /// symmetrized and deduplicated, self-loops dropped. Throws StateError if
  /// any node ends up isolated.
  CoauthorGraph(std::vector<Gender> genders, std::span<const Edge> edges)
      : genders_(std::move(genders)) {
    const auto n = genders_.size();
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw StateError("edge endpoint out of range");
      if (u == v) continue;
      canon.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
    n_edges_ = canon.size();

    offsets_.assign(n + 1, 0);
    for (auto [u, v] : canon) {
      ++offsets_[u + 1];
      ++offsets_[v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adjacency_.resize(2 * canon.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (auto [u, v] : canon) {
      adjacency_[fill[u]++] = v;
      adjacency_[fill[v]++] = u;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (offsets_[i] == offsets_[i + 1])
        throw StateError("author " + std::to_string(i) + " is isolated");
      std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
    }
  }

  std::size_t n_authors() const { return genders_.size(); }
  std::size_t n_edges() const { return n_edges_; }

  std::span<const AuthorId> neighbors(AuthorId u) const {
    return {adjacency_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::size_t degree(AuthorId u) const { return offsets_[u + 1] - offsets_[u]; }
  Gender gender(AuthorId u) const { return genders_[u]; }
  const std::vector<Gender>& genders() const { return genders_; }

  bool has_edge(AuthorId u, AuthorId v) const {
    auto row = neighbors(u);
    return std::binary_search(row.begin(), row.end(), v);
  }

  /// Edges (u < v) in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(n_edges_);
    for (AuthorId u = 0; u < n_authors(); ++u)
      for (AuthorId v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  bool operator==(const CoauthorGraph&) const = default;

 private:
  std::vector<Gender> genders_;
  std::vector<std::size_t> offsets_{0};
  std::vector<AuthorId> adjacency_;
  std::size_t n_edges_ = 0;
};

/// Position lookup over a graph's ids: pos(id) is the slot assigned by
/// `assign`, or -1. Reset with `clear` using the same id list. One scratch
/// buffer per thread, grown on demand.
class IdSlots {
 public:
  explicit IdSlots(std::size_t n_ids) : slots_(buffer()) {
    if (slots_.size() < n_ids) slots_.resize(n_ids, -1);
  }
  void assign(std::span<const AuthorId> ids) {
    for (std::size_t i = 0; i < ids.size(); ++i) slots_[ids[i]] = static_cast<std::int64_t>(i);
  }
  std::int64_t operator[](AuthorId id) const { return slots_[id]; }
  void clear(std::span<const AuthorId> ids) {
    for (auto id : ids) slots_[id] = -1;
  }

 private:
  static std::vector<std::int64_t>& buffer() {
    thread_local std::vector<std::int64_t> b;
    return b;
  }
  std::vector<std::int64_t>& slots_;
};

inline double gender_fraction(const CoauthorGraph& graph, Gender gender) {
  if (graph.n_authors() == 0) return 0.0;
  const auto count = std::count(graph.genders().begin(), graph.genders().end(), gender);
  return static_cast<double>(count) / static_cast<double>(graph.n_authors());
}

/// Fraction of edges joining two authors of the same gender.
inline double same_gender_edge_fraction(const CoauthorGraph& graph) {
  if (graph.n_edges() == 0) return 0.0;
  std::size_t same = 0;
  for (auto [u, v] : graph.edges()) same += graph.gender(u) == graph.gender(v);
  return static_cast<double>(same) / static_cast<double>(graph.n_edges());
}

struct GeneratorParams {
  std::size_t n_authors = 2000;
  double woman_fraction = 0.36;
  double mean_degree = 10.0;
  double gender_assortativity = 0.1;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::uint64_t edge_key(AuthorId u, AuthorId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

/// Keeps the largest connected component (ties: the one containing the
/// smallest id) and renumbers its nodes densely in original order.
inline CoauthorGraph largest_component(std::size_t n, const std::vector<Edge>& edges,
                                       const std::vector<Gender>& genders) {
  std::vector<std::vector<AuthorId>> adj(n);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<int> comp(n, -1);
  std::vector<std::size_t> sizes;
  std::vector<AuthorId> stack;
  for (AuthorId s = 0; s < n; ++s) {
    if (comp[s] >= 0 || adj[s].empty()) continue;
    const int c = static_cast<int>(sizes.size());
    sizes.push_back(0);
    comp[s] = c;
    stack.push_back(s);
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      ++sizes[static_cast<std::size_t>(c)];
      for (auto v : adj[u])
        if (comp[v] < 0) {
          comp[v] = c;
          stack.push_back(v);
        }
    }
  }
  if (sizes.empty()) throw StateError("graph has no edges");
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());

  std::vector<AuthorId> remap(n, 0);
  std::vector<Gender> kept_genders;
  for (AuthorId u = 0; u < n; ++u)
    if (comp[u] == best) {
      remap[u] = static_cast<AuthorId>(kept_genders.size());
      kept_genders.push_back(genders[u]);
    }
  std::vector<Edge> kept_edges;
  for (auto [u, v] : edges)
    if (comp[u] == best) kept_edges.emplace_back(remap[u], remap[v]);
  return CoauthorGraph(std::move(kept_genders), kept_edges);
}

}  // namespace detail

/// Synthetic co-authorship network.
///
/// 1. Preferential attachment: a seed clique, then every new author attaches
///    mean_degree/2 edges (fractional part realized by a coin flip) to
///    existing authors chosen proportionally to degree.
/// 2. Genders are assigned by stratifying over degree rank, so each degree
///    band carries the requested woman fraction and gender is independent
///    of degree.
/// 3. Degree-preserving double-edge swaps that strictly increase the number
///    of same-gender edges are applied until the same-gender fraction reaches
///    f0 + assortativity * (1 - f0), f0 being the fraction before rewiring,
///    or until no improving swap is found within the attempt budget.
/// 4. The largest connected component is kept.
inline CoauthorGraph generate_synthetic(const GeneratorParams& p) {
  if (p.n_authors < 2) throw ConfigError("n_authors must be at least 2");
  if (!(p.woman_fraction >= 0.0 && p.woman_fraction <= 1.0))
    throw ConfigError("woman_fraction must lie in [0, 1]");
  if (!(p.mean_degree > 0.0) || !(p.mean_degree < static_cast<double>(p.n_authors)))
    throw ConfigError("mean_degree must be positive and below n_authors");
  if (!(p.gender_assortativity >= 0.0 && p.gender_assortativity <= 1.0))
    throw ConfigError("gender_assortativity must lie in [0, 1]");

  Rng rng(derive_seed({p.seed, 0x67656e}));
  const std::size_t n = p.n_authors;
  const double per_node = p.mean_degree / 2.0;
  const std::size_t whole = static_cast<std::size_t>(std::floor(per_node));
  const double frac = per_node - static_cast<double>(whole);
  const std::size_t clique = std::min(n, std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(per_node)) + 1));

  std::vector<Edge> edges;
  std::vector<AuthorId> stubs;  // one entry per edge endpoint
  for (AuthorId u = 0; u < clique; ++u)
    for (AuthorId v = u + 1; v < clique; ++v) {
      edges.emplace_back(u, v);
      stubs.push_back(u);
      stubs.push_back(v);
    }
  std::vector<AuthorId> targets;
  for (auto u = static_cast<AuthorId>(clique); u < n; ++u) {
    std::size_t k = whole + (rng.bernoulli(frac) ? 1 : 0);
    k = std::clamp<std::size_t>(k, 1, u);
    targets.clear();
    while (targets.size() < k) {
      const AuthorId t = stubs[rng.index(stubs.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (auto t : targets) {
      edges.emplace_back(t, u);
      stubs.push_back(t);
      stubs.push_back(u);
    }
  }

  std::vector<std::size_t> degree(n, 0);
  for (auto [u, v] : edges) {
    ++degree[u];
    ++degree[v];
  }
  std::vector<AuthorId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> tiebreak(n);
  for (auto& t : tiebreak) t = rng();
  std::sort(order.begin(), order.end(), [&](AuthorId a, AuthorId b) {
    if (degree[a] != degree[b]) return degree[a] > degree[b];
    return tiebreak[a] < tiebreak[b];
  });
  std::vector<Gender> genders(n, Gender::Man);
  const double offset = rng.uniform();
  for (std::size_t r = 0; r < n; ++r) {
    const double lo = std::floor(static_cast<double>(r) * p.woman_fraction + offset);
    const double hi = std::floor(static_cast<double>(r + 1) * p.woman_fraction + offset);
    if (hi > lo) genders[order[r]] = Gender::Woman;
  }

  if (p.gender_assortativity > 0.0 && edges.size() >= 2) {
    std::unordered_set<std::uint64_t> present;
    present.reserve(edges.size() * 2);
    std::size_t same = 0;
    for (auto [u, v] : edges) {
      present.insert(detail::edge_key(u, v));
      same += genders[u] == genders[v];
    }
    const double f0 = static_cast<double>(same) / static_cast<double>(edges.size());
    const double target_fraction = f0 + p.gender_assortativity * (1.0 - f0);
    const auto target = static_cast<std::size_t>(std::ceil(target_fraction * static_cast<double>(edges.size()) - 1e-9));
    const std::size_t budget = 200 * edges.size();
    for (std::size_t attempt = 0; attempt < budget && same < target; ++attempt) {
      const auto i = rng.index(edges.size());
      const auto j = rng.index(edges.size());
      const bool flip = rng.bernoulli(0.5);
      if (i == j) continue;
      auto [a, b] = edges[i];
      auto [c, d] = edges[j];
      if (flip) std::swap(c, d);
      // (a,b),(c,d) -> (a,d),(c,b)
      if (a == d || c == b) continue;
      const int before = (genders[a] == genders[b]) + (genders[c] == genders[d]);
      const int after = (genders[a] == genders[d]) + (genders[c] == genders[b]);
      if (after <= before) continue;
      if (present.count(detail::edge_key(a, d)) || present.count(detail::edge_key(c, b))) continue;
      present.erase(detail::edge_key(a, b));
      present.erase(detail::edge_key(c, d));
      present.insert(detail::edge_key(a, d));
      present.insert(detail::edge_key(c, b));
      edges[i] = {a, d};
      edges[j] = {c, b};
      same += static_cast<std::size_t>(after - before);
    }
  }

  return detail::largest_component(n, edges, genders);
}

/// Result of reading an externally prepared network.
struct LoadedGraph {
  CoauthorGraph graph;
  /// Compact id -> id used in the input files.
  std::vector<std::uint64_t> original_ids;
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

inline bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace detail

/// Reads `u v` edge lines and `id W|M` gender lines. Ids may be arbitrary
/// non-negative integers; nodes left isolated after dropping self-loops are
/// removed and the remainder renumbered in ascending original-id order.
inline LoadedGraph load_edge_list(const std::filesystem::path& edge_path,
                                  const std::filesystem::path& gender_path) {
  std::ifstream edge_in(edge_path);
  if (!edge_in) throw IngestError("cannot open edge list " + edge_path.string());
  std::ifstream gender_in(gender_path);
  if (!gender_in) throw IngestError("cannot open gender file " + gender_path.string());

  struct RawEdge {
    std::uint64_t u, v;
    std::size_t line;
  };
  std::vector<RawEdge> raw;
  std::map<std::uint64_t, std::size_t> first_seen;  // id -> edge-file line
  std::string line;
  for (std::size_t lineno = 1; std::getline(edge_in, line); ++lineno) {
    auto body = detail::strip_comment(line);
    if (detail::is_blank(body)) continue;
    std::istringstream ss(body);
    long long u = -1, v = -1;
    std::string extra;
    if (!(ss >> u >> v) || (ss >> extra) || u < 0 || v < 0)
      throw IngestError(edge_path.string() + ":" + std::to_string(lineno) + ": expected `u v`");
    raw.push_back({static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(v), lineno});
    first_seen.emplace(u, lineno);
    first_seen.emplace(v, lineno);
  }

  std::map<std::uint64_t, Gender> gender_of;
  for (std::size_t lineno = 1; std::getline(gender_in, line); ++lineno) {
    auto body = detail::strip_comment(line);
    if (detail::is_blank(body)) continue;
    std::istringstream ss(body);
    long long id = -1;
    std::string tag, extra;
    std::optional<Gender> g;
    if (!(ss >> id >> tag) || (ss >> extra) || id < 0 || !(g = parse_gender(tag)))
      throw IngestError(gender_path.string() + ":" + std::to_string(lineno) + ": expected `id W|M`");
    const auto key = static_cast<std::uint64_t>(id);
    if (!first_seen.count(key))
      throw IngestError(gender_path.string() + ":" + std::to_string(lineno) + ": unknown author id " +
                        std::to_string(id));
    if (!gender_of.emplace(key, *g).second)
      throw IngestError(gender_path.string() + ":" + std::to_string(lineno) + ": duplicate author id " +
                        std::to_string(id));
  }
  for (auto [id, lineno] : first_seen)
    if (!gender_of.count(id))
      throw IngestError(edge_path.string() + ":" + std::to_string(lineno) + ": author " + std::to_string(id) +
                        " has no gender");

  std::map<std::uint64_t, AuthorId> compact;
  for (const auto& e : raw)
    if (e.u != e.v) {
      compact.emplace(e.u, 0);
      compact.emplace(e.v, 0);
    }
  if (compact.empty()) throw IngestError(edge_path.string() + ": all nodes isolated after self-loop removal");

  LoadedGraph out;
  std::vector<Gender> genders;
  for (auto& [orig, idx] : compact) {
    idx = static_cast<AuthorId>(out.original_ids.size());
    out.original_ids.push_back(orig);
    genders.push_back(gender_of.at(orig));
  }
  std::vector<Edge> edges;
  for (const auto& e : raw)
    if (e.u != e.v) edges.emplace_back(compact.at(e.u), compact.at(e.v));
  out.graph = CoauthorGraph(std::move(genders), edges);
  return out;
}

inline constexpr const char* kEdgeFile = "edges.txt";
inline constexpr const char* kGenderFile = "genders.txt";

inline void write_edge_list(const CoauthorGraph& graph, std::ostream& edges_out, std::ostream& genders_out) {
  for (auto [u, v] : graph.edges()) edges_out << u << ' ' << v << '\n';
  for (AuthorId u = 0; u < graph.n_authors(); ++u) genders_out << u << ' ' << gender_code(graph.gender(u)) << '\n';
}

/// Writes edges.txt and genders.txt into `dir`.
inline void write_graph(const CoauthorGraph& graph, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream e(dir / kEdgeFile, std::ios::binary);
  std::ofstream g(dir / kGenderFile, std::ios::binary);
  if (!e || !g) throw Error("cannot write graph files into " + dir.string());
  write_edge_list(graph, e, g);
}

inline LoadedGraph read_graph(const std::filesystem::path& dir) {
  return load_edge_list(dir / kEdgeFile, dir / kGenderFile);
}

}  // namespace citesim
