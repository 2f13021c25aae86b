#pragma once

// Learning from a partner's discussion list. The listener forms the
// transition estimate  Â = (1 - e^-ζ) A (I - e^-ζ A)^-1  over the discussed
// authors, picks the authors with a strong incident weight, and swaps them
// into its estimate in exchange for the same number of rarely cited nodes.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "citesim/agents.hpp"
#include "citesim/error.hpp"
#include "citesim/graph.hpp"

namespace citesim {

using Matrix = Eigen::MatrixXd;

struct TransitionEstimate {
  std::vector<AuthorId> authors;
  Matrix weights;  // weights(i, j) = estimated transition i -> j
};

/// Row-normalized adjacency of C induced on `authors`. A row with no
/// induced edge becomes uniform over the other authors ([[1]] for a single
/// author).
inline Matrix true_transition_matrix(const CoauthorGraph& graph, std::span<const AuthorId> authors) {
  const auto k = static_cast<Eigen::Index>(authors.size());
  if (k == 0) throw StateError("transition matrix over no authors");
  Matrix a = Matrix::Zero(k, k);
  IdSlots slots(graph.n_authors());
  slots.assign(authors);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (auto v : graph.neighbors(authors[static_cast<std::size_t>(i)]))
      if (auto j = slots[v]; j >= 0 && j != i) a(i, j) = 1.0;
    const double deg = a.row(i).sum();
    if (deg > 0.0) {
      a.row(i) /= deg;
    } else if (k == 1) {
      a(i, i) = 1.0;
    } else {
      a.row(i).setConstant(1.0 / static_cast<double>(k - 1));
      a(i, i) = 0.0;
    }
  }
  slots.clear(authors);
  return a;
}

/// Solves (I - qA) X = A with q = e^-ζ and returns (1 - q) X.
inline Matrix learned_transition_estimate(const Matrix& a, double zeta) {
  if (!(zeta > 0.0)) throw ConfigError("zeta must be positive");
  const double q = std::exp(-zeta);
  const Matrix m = Matrix::Identity(a.rows(), a.cols()) - q * a;
  Matrix x = m.partialPivLu().solve(a);
  const double residual = (m * x - a).cwiseAbs().maxCoeff();
  if (!(residual < 1e-10)) throw StateError("transition estimate solve did not converge");
  x *= (1.0 - q);
  return x.cwiseMax(0.0);
}

inline TransitionEstimate learned_transition_estimate(const CoauthorGraph& graph,
                                                      std::vector<AuthorId> authors, double zeta) {
  TransitionEstimate est;
  est.weights = learned_transition_estimate(true_transition_matrix(graph, authors), zeta);
  est.authors = std::move(authors);
  return est;
}

/// Largest off-diagonal weight incident to each author, in either direction.
inline std::vector<double> max_incident_weight(const Matrix& w) {
  const auto k = w.rows();
  std::vector<double> best(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i == j) continue;
      const double v = std::max(w(i, j), w(j, i));
      best[static_cast<std::size_t>(i)] = std::max(best[static_cast<std::size_t>(i)], v);
    }
  return best;
}

/// Authors with at least one incident weight strictly above `threshold`,
/// ascending by id.
inline std::vector<AuthorId> select_central_authors(const TransitionEstimate& est, double threshold) {
  const auto best = max_incident_weight(est.weights);
  std::vector<AuthorId> out;
  for (std::size_t i = 0; i < best.size(); ++i)
    if (best[i] > threshold) out.push_back(est.authors[i]);
  std::sort(out.begin(), out.end());
  return out;
}

struct LearnReport {
  std::size_t n_learned = 0;
  std::vector<AuthorId> learned;
  std::vector<AuthorId> forgotten;
};

/// Distinct authors in order of first appearance.
inline std::vector<AuthorId> distinct_in_order(std::span<const AuthorId> list) {
  std::vector<AuthorId> out;
  std::unordered_set<AuthorId> seen;
  for (auto a : list)
    if (seen.insert(a).second) out.push_back(a);
  return out;
}

/// Updates `agent.estimate` from a partner's discussion list, keeping the
/// estimate size fixed. See the file comment for the rule; the learn count
/// is capped by the number of estimate nodes that may be forgotten (those
/// not in `discussed`) and by |estimate| - 1.
inline LearnReport apply_learning(Agent& agent, std::span<const AuthorId> discussed, const CoauthorGraph& graph,
                                  double threshold) {
  LearnReport report;
  if (discussed.empty()) return report;

  const auto authors = distinct_in_order(discussed);
  if (std::all_of(authors.begin(), authors.end(), [&](AuthorId a) { return agent.estimate.contains(a); }))
    return report;
  const Matrix weights = learned_transition_estimate(true_transition_matrix(graph, authors), agent.params.zeta);
  const auto best = max_incident_weight(weights);

  struct Candidate {
    AuthorId id;
    double weight;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < authors.size(); ++i)
    if (best[i] > threshold && !agent.estimate.contains(authors[i])) candidates.push_back({authors[i], best[i]});
  if (candidates.empty()) return report;

  const std::unordered_set<AuthorId> in_discussion(authors.begin(), authors.end());
  struct Forgettable {
    AuthorId id;
    std::uint64_t frequency;
  };
  std::vector<Forgettable> forgettable;
  for (auto node : agent.estimate.nodes())
    if (!in_discussion.count(node)) forgettable.push_back({node, agent.history.frequency(node)});

  const std::size_t est_size = agent.estimate.size();
  const std::size_t cap = std::min(est_size > 0 ? est_size - 1 : 0, forgettable.size());
  const std::size_t count = std::min(candidates.size(), cap);
  if (count == 0) return report;

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.id < b.id;
  });
  std::partial_sort(forgettable.begin(), forgettable.begin() + static_cast<std::ptrdiff_t>(count), forgettable.end(),
                    [](const Forgettable& a, const Forgettable& b) {
                      if (a.frequency != b.frequency) return a.frequency < b.frequency;
                      return a.id < b.id;
                    });

  for (std::size_t i = 0; i < count; ++i) {
    report.learned.push_back(candidates[i].id);
    report.forgotten.push_back(forgettable[i].id);
  }
  std::sort(report.learned.begin(), report.learned.end());
  std::sort(report.forgotten.begin(), report.forgotten.end());
  report.n_learned = count;

  std::vector<AuthorId> nodes;
  nodes.reserve(est_size);
  std::set_difference(agent.estimate.nodes().begin(), agent.estimate.nodes().end(), report.forgotten.begin(),
                      report.forgotten.end(), std::back_inserter(nodes));
  nodes.insert(nodes.end(), report.learned.begin(), report.learned.end());
  agent.estimate = Estimate::induce(graph, std::move(nodes));
  return report;
}

}  // namespace citesim
