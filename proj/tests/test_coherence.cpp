#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gitaudit/coherence.hpp"
#include "test_support.hpp"

using namespace gitaudit;

namespace {

Person person(PersonId id, std::map<std::string, std::int64_t> contrib) {
  Person p;
  p.id = id;
  p.names = {"N" + std::to_string(id)};
  p.emails = {"n" + std::to_string(id) + "@x"};
  p.contributions = std::move(contrib);
  p.lines = static_cast<std::int64_t>(p.contributions.size());
  return p;
}

std::vector<Person> random_persons(std::mt19937_64& rng, std::size_t count, std::size_t repos) {
  std::vector<Person> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::map<std::string, std::int64_t> c;
    for (auto k = 1 + rng() % 5; k > 0; --k)
      c["o/r" + std::to_string(rng() % repos)] += 1 + static_cast<std::int64_t>(rng() % 20);
    out.push_back(person(i + 1, c));
  }
  return out;
}

// Pairwise definition: every ordered repository pair, every person.
std::map<std::pair<std::string, std::string>, double> brute_edges(const std::vector<Person>& persons) {
  std::set<std::string> repos;
  for (const auto& p : persons)
    for (const auto& [r, n] : p.contributions) repos.insert(r);
  std::map<std::pair<std::string, std::string>, double> out;
  for (const auto& p : persons) {
    std::int64_t total = 0;
    for (const auto& [r, n] : p.contributions) total += n;
    for (const auto& a : repos)
      for (const auto& b : repos) {
        if (a == b || !p.contributions.count(a) || !p.contributions.count(b)) continue;
        out[{a, b}] += static_cast<double>(p.contributions.at(b)) / static_cast<double>(total);
      }
  }
  return out;
}

std::vector<Recommendation> brute_recommend(const CoherenceGraph& g, const Person& p, std::size_t k,
                                            const std::map<std::string, std::string>& langs = {},
                                            double bonus = 1.5) {
  std::set<std::string> mine_langs;
  for (const auto& [r, n] : p.contributions)
    if (langs.count(r)) mine_langs.insert(langs.at(r));
  std::vector<Recommendation> all;
  for (const auto& cand : g.vertices) {
    if (p.contributions.count(cand)) continue;
    double s = 0;
    bool linked = false;
    for (const auto& [from, n] : p.contributions) {
      auto it = g.edges.find({from, cand});
      if (it != g.edges.end()) {
        s += it->second;
        linked = true;
      }
    }
    if (!linked) continue;
    if (langs.count(cand) && mine_langs.count(langs.at(cand))) s *= bonus;
    all.push_back({cand, s});
  }
  std::sort(all.begin(), all.end(), [](const Recommendation& a, const Recommendation& b) {
    return a.score != b.score ? a.score > b.score : a.full_name < b.full_name;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace

TEST_SUITE("coherence") {
  TEST_CASE("one person across two repositories") {
    CoherenceGraph g;
    g.add_person(person(1, {{"A", 1}, {"B", 3}}));
    CHECK(g.weight("A", "B") == doctest::Approx(0.75));
    CHECK(g.weight("B", "A") == doctest::Approx(0.25));
    CHECK(g.edges.size() == 2);
    CHECK(g.vertices == std::set<std::string>{"A", "B"});
  }

  TEST_CASE("single-repository persons add vertices only") {
    CoherenceGraph g;
    g.add_person(person(1, {{"A", 4}}));
    g.add_person(person(2, {{"B", 1}}));
    CHECK(g.edges.empty());
    CHECK(g.vertices.size() == 2);
    CHECK(edge_increment({{"A", 1}}, "Z", 1) == 0.0);
  }

  TEST_CASE("graph matches the pairwise definition") {
    std::mt19937_64 rng(31);
    auto persons = random_persons(rng, 200, 25);
    auto db = PersonDatabase::from_persons(persons);
    auto g = build_graph(db);
    auto ref = brute_edges(persons);
    CHECK(g.edges == ref);
  }

  TEST_CASE("each person's outgoing weight sums to repos minus one") {
    std::mt19937_64 rng(32);
    for (const auto& p : random_persons(rng, 100, 15)) {
      CoherenceGraph g;
      g.add_person(p);
      double sum = 0;
      for (const auto& [k, w] : g.edges) sum += w;
      CHECK(sum == doctest::Approx(static_cast<double>(p.contributions.size()) - 1.0));
    }
  }

  TEST_CASE("person order does not matter beyond rounding") {
    std::mt19937_64 rng(33);
    auto persons = random_persons(rng, 150, 20);
    CoherenceGraph a;
    for (const auto& p : persons) a.add_person(p);
    std::shuffle(persons.begin(), persons.end(), rng);
    CoherenceGraph b;
    for (const auto& p : persons) b.add_person(p);
    REQUIRE(a.edges.size() == b.edges.size());
    for (const auto& [k, w] : a.edges) CHECK(std::abs(b.edges.at(k) - w) <= 1e-9);
  }

  TEST_CASE("recommendation example") {
    std::vector<Person> ps{person(1, {{"A", 1}, {"B", 1}}), person(2, {{"A", 1}, {"C", 3}}),
                           person(3, {{"B", 2}, {"C", 2}}), person(4, {{"A", 5}})};
    auto db = PersonDatabase::from_persons(ps);
    auto g = build_graph(db);
    // A->B 0.5, A->C 0.75; person 4 only touched A
    auto recs = recommend(g, ps[3], 5);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].full_name == "C");
    CHECK(recs[0].score == doctest::Approx(0.75));
    CHECK(recs[1].full_name == "B");
    CHECK(recs[1].score == doctest::Approx(0.5));
    CHECK(recommend(g, ps[3], 1).size() == 1);
    CHECK_THROWS_AS(recommend(g, ps[3], 0), std::invalid_argument);
  }

  TEST_CASE("ties are broken by name") {
    CoherenceGraph g;
    g.add_person(person(1, {{"A", 1}, {"Y", 1}}));
    g.add_person(person(2, {{"A", 1}, {"X", 1}}));
    auto recs = recommend(g, person(9, {{"A", 1}}), 2);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].full_name == "X");
    CHECK(recs[1].full_name == "Y");
  }

  TEST_CASE("recommendations match a direct scorer") {
    std::mt19937_64 rng(34);
    auto persons = random_persons(rng, 200, 30);
    auto g = build_graph(PersonDatabase::from_persons(persons));
    std::map<std::string, std::string> langs;
    for (int i = 0; i < 30; ++i) langs["o/r" + std::to_string(i)] = i % 3 ? "C" : "Rust";
    for (const auto& p : persons) {
      auto recs = recommend(g, p, 5);
      CHECK(recs == brute_recommend(g, p, 5));
      for (const auto& r : recs) CHECK_FALSE(p.contributions.count(r.full_name));
      CHECK(recommend(g, p, 4, {langs, 1.5}) == brute_recommend(g, p, 4, langs, 1.5));
    }
  }

  TEST_CASE("language bonus reorders candidates") {
    CoherenceGraph g;
    g.add_person(person(1, {{"A", 1}, {"B", 2}}));
    g.add_person(person(2, {{"A", 1}, {"C", 1}}));
    Person me = person(9, {{"A", 1}});
    CHECK(recommend(g, me, 1)[0].full_name == "B");
    RecommendOptions opts;
    opts.repo_languages = {{"A", "Go"}, {"B", "C"}, {"C", "Go"}};
    opts.language_bonus = 2.0;
    auto recs = recommend(g, me, 2, opts);
    CHECK(recs[0].full_name == "C");
    CHECK(recs[0].score == doctest::Approx(1.0));
  }

  TEST_CASE("exports") {
    CoherenceGraph g;
    g.add_person(person(1, {{"a/x", 1}, {"b/\"y", 3}}));
    CHECK(to_edge_list(g) == "a/x\tb/\"y\t0.750000\nb/\"y\ta/x\t0.250000\n");
    auto dot = to_dot(g);
    CHECK(dot.find("digraph coherence {") == 0);
    CHECK(dot.find("\"a/x\" -> \"b/\\\"y\" [weight=0.750000") != std::string::npos);
  }
}
