#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gitaudit/identity.hpp"

namespace gitaudit {

/// Repositories as vertices; edge A->B accumulates how much of each shared
/// contributor's work went into B.
struct CoherenceGraph {
  std::set<std::string> vertices;
  std::map<std::pair<std::string, std::string>, double> edges;

  double weight(const std::string& from, const std::string& to) const;
  /// Adds one person's contribution pattern to the graph.
  void add_person(const Person& p);
  bool operator==(const CoherenceGraph&) const = default;
};

/// The amount a person with `contributions` adds to edge from->to: the
/// target's share of the person's commits.
double edge_increment(const std::map<std::string, std::int64_t>& contributions,
                      const std::string& to, std::int64_t total_commits);

/// Folds add_person over the database in id order.
CoherenceGraph build_graph(const PersonDatabase& db);

struct Recommendation {
  std::string full_name;
  double score = 0;
  bool operator==(const Recommendation&) const = default;
};

struct RecommendOptions {
  /// When non-empty, candidates whose main language matches one of the
  /// person's contributed repositories' languages get `language_bonus` x score.
  std::map<std::string, std::string> repo_languages;
  double language_bonus = 1.5;
};

/// Top-k repositories the person has not contributed to, scored by summed
/// incoming weight from the person's repositories. Ties by name.
std::vector<Recommendation> recommend(const CoherenceGraph& graph, const Person& p, std::size_t k,
                                      const RecommendOptions& opts = {});

/// `from<TAB>to<TAB>weight` lines, weight with 6 decimals, sorted by (from, to).
std::string to_edge_list(const CoherenceGraph& graph);
/// Graphviz digraph.
std::string to_dot(const CoherenceGraph& graph);

}  // namespace gitaudit
