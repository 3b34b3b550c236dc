#include "gitaudit/coherence.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace gitaudit {

double CoherenceGraph::weight(const std::string& from, const std::string& to) const {
  auto it = edges.find({from, to});
  return it == edges.end() ? 0.0 : it->second;
}

double edge_increment(const std::map<std::string, std::int64_t>& contributions,
                      const std::string& to, std::int64_t total_commits) {
  auto it = contributions.find(to);
  if (it == contributions.end() || total_commits <= 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total_commits);
}

void CoherenceGraph::add_person(const Person& p) {
  for (const auto& [repo, n] : p.contributions) vertices.insert(repo);
  if (p.contributions.size() < 2) return;
  const auto total = p.total_commits();
  for (const auto& [from, n_from] : p.contributions)
    for (const auto& [to, n_to] : p.contributions)
      if (from != to) edges[{from, to}] += edge_increment(p.contributions, to, total);
}

CoherenceGraph build_graph(const PersonDatabase& db) {
  CoherenceGraph g;
  for (const Person* p : db.persons()) g.add_person(*p);
  return g;
}

std::vector<Recommendation> recommend(const CoherenceGraph& graph, const Person& p, std::size_t k,
                                      const RecommendOptions& opts) {
  if (k == 0) throw std::invalid_argument("recommend: k must be >= 1");

  std::map<std::string, double> scores;
  for (const auto& [from, n] : p.contributions) {
    for (auto it = graph.edges.lower_bound({from, std::string()});
         it != graph.edges.end() && it->first.first == from; ++it) {
      const auto& to = it->first.second;
      if (!p.contributions.contains(to)) scores[to] += it->second;
    }
  }

  if (!opts.repo_languages.empty()) {
    std::set<std::string> langs;
    for (const auto& [repo, n] : p.contributions)
      if (auto it = opts.repo_languages.find(repo); it != opts.repo_languages.end())
        langs.insert(it->second);
    for (auto& [repo, s] : scores)
      if (auto it = opts.repo_languages.find(repo);
          it != opts.repo_languages.end() && langs.contains(it->second))
        s *= opts.language_bonus;
  }

  std::vector<Recommendation> out;
  out.reserve(scores.size());
  for (auto& [repo, s] : scores) out.push_back({repo, s});
  std::sort(out.begin(), out.end(), [](const Recommendation& a, const Recommendation& b) {
    return a.score != b.score ? a.score > b.score : a.full_name < b.full_name;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

std::string to_edge_list(const CoherenceGraph& graph) {
  std::string out;
  char buf[64];
  for (const auto& [key, w] : graph.edges) {
    std::snprintf(buf, sizeof buf, "%.6f", w);
    out += key.first;
    out += '\t';
    out += key.second;
    out += '\t';
    out += buf;
    out += '\n';
  }
  return out;
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_dot(const CoherenceGraph& graph) {
  std::string out = "digraph coherence {\n";
  for (const auto& v : graph.vertices) out += "  " + dot_quote(v) + ";\n";
  char buf[64];
  for (const auto& [key, w] : graph.edges) {
    std::snprintf(buf, sizeof buf, "%.6f", w);
    out += "  " + dot_quote(key.first) + " -> " + dot_quote(key.second) + " [weight=" + buf +
           ", label=\"" + buf + "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace gitaudit
