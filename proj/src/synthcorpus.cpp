#include "gitaudit/synthcorpus.hpp"

#include <algorithm>
#include <array>
#include <json.hpp>
#include <map>
#include <random>
#include <set>

#include "gitaudit/errors.hpp"
#include "gitaudit/process.hpp"

namespace gitaudit {

namespace {

// Fixed epoch for commit timestamps so regeneration is byte-stable.
constexpr std::int64_t kEpoch = 1500000000;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Modulo draw: portable across standard libraries, unlike the distributions.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

constexpr std::array kFirst{"Ada",    "Grace",  "Linus",  "Frederick", "Margaret", "Dennis", "Barbara",
                            "Ken",    "Radia",  "Edsger", "Frances",   "Donald",   "Hedy",   "Alan",
                            "Sophie", "Guido",  "Bjarne", "Anita",     "Tim",      "Karen",  "John",
                            "Leslie", "Niklaus", "Joan",  "Yukihiro",  "Shafi",    "Whitfield"};
constexpr std::array kLast{"Lovelace", "Hopper",  "Torvalds", "Pietschmann", "Hamilton", "Ritchie",
                           "Liskov",   "Thompson", "Perlman", "Dijkstra",    "Allen",    "Knuth",
                           "Lamarr",   "Turing",   "Wilson",  "Rossum",      "Stroustrup", "Borg",
                           "Berners",  "Jones",    "Smith",   "Lamport",     "Wirth",    "Clarke",
                           "Matsumoto", "Goldwasser", "Diffie"};

std::string lower_ascii(std::string s) {
  for (auto& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

}  // namespace

std::vector<ShortlogLine> CorpusSpec::lines_for_repo(std::size_t repo) const {
  std::map<std::pair<std::string, std::string>, std::int64_t> agg;
  for (const auto& p : persons)
    for (const auto& c : p.commits)
      if (c.repo == repo) agg[{p.names.at(c.alias), c.email ? p.emails.at(*c.email) : std::string()}] += c.commits;
  std::vector<ShortlogLine> out;
  for (const auto& [key, n] : agg) out.push_back({n, key.first, key.second});
  return out;
}

std::vector<RepoLine> CorpusSpec::emitted_lines() const {
  std::vector<RepoLine> out;
  for (std::size_t r = 0; r < repos.size(); ++r)
    for (auto& line : lines_for_repo(r)) out.push_back({repos[r], std::move(line)});
  return out;
}

std::int64_t CorpusSpec::commits_in_repo(std::size_t repo) const {
  std::int64_t n = 0;
  for (const auto& p : persons)
    for (const auto& c : p.commits)
      if (c.repo == repo) n += c.commits;
  return n;
}

std::vector<std::vector<std::size_t>> CorpusSpec::expected_partition() const {
  const auto lines = emitted_lines();
  return brute_force_resolve(lines);
}

CorpusSpec random_corpus_spec(std::uint64_t seed, const SynthParams& params) {
  if (params.repo_count == 0) throw std::invalid_argument("repo_count must be positive");
  Rng rng(seed);
  CorpusSpec spec;
  spec.seed = seed;
  for (std::size_t r = 0; r < params.repo_count; ++r)
    spec.repos.push_back("org" + std::to_string(r % 7) + "/project-" + std::to_string(r));

  std::vector<std::string> all_names;
  for (std::size_t i = 0; i < params.person_count; ++i) {
    SynthPerson p;
    const std::string first = kFirst[rng.below(kFirst.size())];
    const std::string last = kLast[rng.below(kLast.size())];
    const std::string tag = std::to_string(i);
    p.names.push_back(first + " " + last);

    const std::size_t alias_count = 1 + rng.below(3);
    while (p.names.size() < alias_count) {
      std::string alias;
      if (!all_names.empty() && rng.chance(params.shared_alias_probability))
        alias = all_names[rng.below(all_names.size())];
      else if (rng.chance(0.5))
        alias = first.substr(0, 1) + ". " + last;
      else
        alias = first + " " + last.substr(0, 1) + tag;
      if (std::find(p.names.begin(), p.names.end(), alias) == p.names.end()) p.names.push_back(alias);
      else break;
    }

    const std::size_t email_count = rng.below(4);
    for (std::size_t e = 0; e < email_count; ++e) {
      if (rng.chance(params.noreply_probability)) {
        const std::string handle = lower_ascii(first.substr(0, 1) + last) + tag + (e ? "x" + std::to_string(e) : "");
        if (rng.chance(0.5))
          p.emails.push_back(std::to_string(100000 + i * 10 + e) + "+" + handle + "@users.noreply.github.com");
        else
          p.emails.push_back(handle + "@users.noreply.github.com");
        if (p.names.size() < 3 && rng.chance(params.username_as_alias_probability)) p.names.push_back(handle);
      } else {
        p.emails.push_back(lower_ascii(first) + "." + lower_ascii(last) + tag + (e ? "-" + std::to_string(e) : "") +
                           "@mail" + std::to_string(rng.below(5)) + ".example.org");
      }
    }

    std::vector<std::size_t> repo_order(params.repo_count);
    for (std::size_t r = 0; r < repo_order.size(); ++r) repo_order[r] = r;
    rng.shuffle(repo_order);
    const std::size_t n_repos =
        1 + rng.below(std::min(params.max_repos_per_person, params.repo_count));
    for (std::size_t k = 0; k < n_repos; ++k) {
      const std::size_t groups = 1 + rng.below(2);
      for (std::size_t g = 0; g < groups; ++g) {
        SynthCommits c;
        c.repo = repo_order[k];
        c.alias = rng.below(p.names.size());
        if (!p.emails.empty()) c.email = rng.below(p.emails.size());
        c.commits = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::size_t>(params.max_commits_per_identity)));
        p.commits.push_back(c);
      }
    }
    for (const auto& n : p.names) all_names.push_back(n);
    spec.persons.push_back(std::move(p));
  }
  return spec;
}

CorpusSpec bridge_scenario_spec() {
  CorpusSpec spec;
  spec.seed = 6;
  spec.repos = {"knothed/alpha", "knothed/beta"};
  SynthPerson fp;
  fp.names = {"Frederick Pietschmann"};
  fp.emails = {"frederick@pietschmann.example", "15064281+FrederickPietschmann@users.noreply.github.com"};
  fp.commits = {{0, 0, 0, 4}, {1, 0, 1, 7}};
  SynthPerson dk;
  dk.names = {"knothed", "David Knothe"};
  dk.emails = {"david@knothe.example", "knothed@users.noreply.github.com"};
  dk.commits = {{0, 0, 0, 2}, {1, 1, 1, 5}};
  spec.persons = {fp, dk};
  return spec;
}

// ---------------------------------------------------------------------------

std::string corpus_spec_to_json(const CorpusSpec& spec) {
  nlohmann::ordered_json j;
  j["seed"] = spec.seed;
  j["repos"] = spec.repos;
  j["persons"] = nlohmann::ordered_json::array();
  for (const auto& p : spec.persons) {
    nlohmann::ordered_json pj;
    pj["names"] = p.names;
    pj["emails"] = p.emails;
    pj["commits"] = nlohmann::ordered_json::array();
    for (const auto& c : p.commits)
      pj["commits"].push_back({{"repo", c.repo},
                               {"alias", c.alias},
                               {"email", c.email ? nlohmann::ordered_json(*c.email) : nlohmann::ordered_json(nullptr)},
                               {"commits", c.commits}});
    j["persons"].push_back(std::move(pj));
  }
  j["expected_partition"] = spec.expected_partition();
  return j.dump(2) + "\n";
}

CorpusSpec corpus_spec_from_json(const std::string& text) {
  CorpusSpec spec;
  try {
    auto j = nlohmann::json::parse(text);
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.repos = j.at("repos").get<std::vector<std::string>>();
    for (const auto& pj : j.at("persons")) {
      SynthPerson p;
      p.names = pj.at("names").get<std::vector<std::string>>();
      p.emails = pj.at("emails").get<std::vector<std::string>>();
      if (p.names.empty()) throw FixtureError("synthetic person without a name");
      for (const auto& cj : pj.at("commits")) {
        SynthCommits c;
        c.repo = cj.at("repo").get<std::size_t>();
        c.alias = cj.at("alias").get<std::size_t>();
        if (!cj.at("email").is_null()) c.email = cj.at("email").get<std::size_t>();
        c.commits = cj.at("commits").get<std::int64_t>();
        if (c.repo >= spec.repos.size() || c.alias >= p.names.size() ||
            (c.email && *c.email >= p.emails.size()) || c.commits < 1)
          throw FixtureError("commit group out of range");
        p.commits.push_back(c);
      }
      spec.persons.push_back(std::move(p));
    }
    if (auto it = j.find("expected_partition"); it != j.end()) {
      auto stored = it->get<std::vector<std::vector<std::size_t>>>();
      if (stored != spec.expected_partition())
        throw FixtureError("expected_partition disagrees with the emitted lines");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FixtureError(std::string("malformed corpus spec: ") + e.what());
  }
  for (const auto& r : spec.repos) {
    RepoRecord probe{r, "x", 0, 0, std::nullopt};
    try {
      probe.validate();
    } catch (const std::invalid_argument& e) {
      throw FixtureError(e.what());
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------

namespace {

void git_or_throw(const std::vector<std::string>& args, const std::filesystem::path& cwd,
                  const std::string& stdin_data = {}) {
  ProcessOptions opts;
  opts.cwd = cwd;
  opts.stdin_data = stdin_data;
  opts.env = {{"GIT_CONFIG_NOSYSTEM", "1"}};
  auto res = run_process(args, opts);
  if (!res.ok()) {
    std::string cmd;
    for (const auto& a : args) cmd += a + " ";
    throw ToolFailure("command failed: " + cmd, res.err);
  }
}

std::string fast_import_stream(const std::vector<std::pair<std::string, std::string>>& commits) {
  std::string s;
  for (std::size_t k = 0; k < commits.size(); ++k) {
    const auto& [name, email] = commits[k];
    const std::string ident = name + " <" + email + "> " + std::to_string(kEpoch + static_cast<std::int64_t>(k) * 60) + " +0000";
    const std::string msg = "commit " + std::to_string(k + 1) + "\n";
    const std::string content = std::to_string(k + 1) + "\n";
    s += "commit refs/heads/main\n";
    s += "author " + ident + "\n";
    s += "committer " + ident + "\n";
    s += "data " + std::to_string(msg.size()) + "\n" + msg;
    s += "M 644 inline counter.txt\n";
    s += "data " + std::to_string(content.size()) + "\n" + content + "\n";
  }
  return s;
}

}  // namespace

std::vector<std::filesystem::path> generate_corpus(const CorpusSpec& spec,
                                                   const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<fs::path> paths;
  for (std::size_t r = 0; r < spec.repos.size(); ++r) {
    RepoRecord rec{spec.repos[r], "-", 0, 0, std::nullopt};
    const fs::path path = fs::absolute(out_dir / rec.dir_name());
    fs::remove_all(path, ec);
    fs::create_directories(path, ec);
    if (ec) throw IoError("cannot create " + path.string() + ": " + ec.message());
    git_or_throw({"git", "init", "-q", "-b", "main", path.string()}, out_dir);

    std::vector<std::pair<std::string, std::string>> commits;
    for (const auto& p : spec.persons)
      for (const auto& c : p.commits)
        if (c.repo == r)
          for (std::int64_t k = 0; k < c.commits; ++k)
            commits.emplace_back(p.names[c.alias], c.email ? p.emails[*c.email] : std::string());
    Rng rng(spec.seed * 1000003u + r);
    rng.shuffle(commits);
    if (!commits.empty()) {
      git_or_throw({"git", "fast-import", "--quiet"}, path, fast_import_stream(commits));
      git_or_throw({"git", "reset", "-q", "--hard", "main"}, path);
    }
    paths.push_back(path);
  }
  return paths;
}

std::vector<RepoRecord> corpus_catalog(const CorpusSpec& spec,
                                       const std::vector<std::filesystem::path>& repo_paths) {
  if (repo_paths.size() != spec.repos.size())
    throw std::invalid_argument("corpus_catalog: one path per spec repository required");
  Rng rng(spec.seed ^ 0x5eedca7a10cULL);
  std::vector<RepoRecord> out;
  for (std::size_t r = 0; r < spec.repos.size(); ++r) {
    RepoRecord rec;
    rec.full_name = spec.repos[r];
    rec.clone_url = repo_paths[r].string();
    rec.stars = 5 + static_cast<std::int64_t>(rng.below(5000));
    rec.size_kb = 1 + static_cast<std::int64_t>(rng.below(2000));
    static constexpr std::array kLanguages{"C++", "Rust", "Go", "Python", "JavaScript"};
    if (!rng.chance(0.1)) rec.main_language = kLanguages[rng.below(kLanguages.size())];
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace gitaudit
