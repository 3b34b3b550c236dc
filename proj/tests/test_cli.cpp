#include <doctest.h>

#include <fstream>
#include <sstream>

#include "gitaudit/store.hpp"
#include "gitaudit/synthcorpus.hpp"
#include "test_support.hpp"

using namespace gitaudit;
namespace fs = std::filesystem;

namespace {

ProcessResult cli(const std::vector<std::string>& args, const fs::path& cwd = {}) {
  std::vector<std::string> argv{GIT_AUDIT_CLI};
  argv.insert(argv.end(), args.begin(), args.end());
  ProcessOptions o;
  if (!cwd.empty()) o.cwd = cwd;
  o.timeout = std::chrono::milliseconds(120000);
  return run_process(argv, o);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 1") {
    CHECK(cli({}).exit_code == 1);
    CHECK(cli({"frobnicate"}).exit_code == 1);
    CHECK(cli({"estimate", "--metric", "nope", "--num-repos", "10"}).exit_code == 1);
    CHECK(cli({"estimate", "--metric", "total-persons"}).exit_code == 1);
    CHECK(cli({"--help"}).exit_code == 0);
  }

  TEST_CASE("estimate prints published-curve values") {
    auto r = cli({"estimate", "--metric", "total-persons", "--num-repos", "1000000"});
    REQUIRE(r.exit_code == 0);
    const double persons = std::stod(r.out);
    CHECK(persons == doctest::Approx(648000).epsilon(0.01));
    CHECK(r.err.find("phishing") != std::string::npos);

    r = cli({"estimate", "--metric", "compromised-pct", "--num-repos", "1000000"});
    CHECK(r.out == "45.4%\n");
    r = cli({"estimate", "--metric", "shortlog-lines", "--num-repos", "7000000", "--constants", "published"});
    CHECK(r.out == "5291503\n");
    r = cli({"estimate", "--metric", "total-time", "--num-repos", "1000000"});
    CHECK(r.out == "100000 s (27.8 h)\n");
  }

  TEST_CASE("estimate with fitted constants") {
    testing::TempDir tmp("cli");
    std::ofstream(tmp / "pts.txt") << "10 20\n20 40\n40 80\n";
    auto r = cli({"estimate", "--metric", "shortlog-lines", "--num-repos", "100", "--constants", "fit",
                  (tmp / "pts.txt").string()});
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == "200\n");
    CHECK(cli({"estimate", "--metric", "shortlog-lines", "--num-repos", "100", "--constants", "guess"}).exit_code == 1);
    std::ofstream(tmp / "one.txt") << "10 20\n";
    CHECK(cli({"estimate", "--metric", "shortlog-lines", "--num-repos", "100", "--constants", "fit",
               (tmp / "one.txt").string()})
              .exit_code == 2);
  }

  TEST_CASE("end-to-end on a synthetic corpus") {
    testing::TempDir tmp("cli");
    const auto corpus = tmp / "corpus";
    auto r = cli({"synth", "--out", corpus.string(), "--seed", "3", "--repos", "8", "--persons", "25"});
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(fs::exists(corpus / "spec.json"));
    CHECK(fs::exists(corpus / "catalog.ndjson"));

    const auto cat = tmp / "cat.ndjson";
    r = cli({"fetch", "--num-repos", "8", "--fixtures", (corpus / "fixtures").string(), "--out", cat.string()});
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(load_catalog(cat).size() == 8);
    CHECK(cli({"fetch", "--num-repos", "8", "--out", cat.string()}).exit_code == 1);

    const auto db = tmp / "db.ndjson";
    r = cli({"run", "--catalog", cat.string(), "--keep", "1.0", "--db", db.string(), "--work-dir",
             (tmp / "work").string(), "-q"});
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    auto spec = corpus_spec_from_json(slurp(corpus / "spec.json"));
    auto loaded = load_database(db);
    CHECK(loaded.size() == spec.expected_partition().size());
    CHECK(fs::exists(fs::path(db.string() + ".pipeline.json")));

    r = cli({"stats", "--db", db.string()});
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("total persons:     " + std::to_string(loaded.size())) != std::string::npos);
    CHECK(r.out.find("failed repos:      0.0%") != std::string::npos);

    r = cli({"graph", "--db", db.string(), "--out", (tmp / "g.dot").string(), "--format", "dot"});
    CHECK(r.exit_code == 0);
    CHECK(slurp(tmp / "g.dot").rfind("digraph", 0) == 0);

    r = cli({"audit", "--db", db.string(), "--json"});
    REQUIRE(r.exit_code == 0);
    std::size_t lines = 0;
    for (char c : r.out) lines += c == '\n';
    CHECK(lines == loaded.size() + 1);
    CHECK(cli({"audit", "--db", db.string(), "--json", "--text"}).exit_code == 1);

    r = cli({"recommend", "--db", db.string(), "--person", "1", "-k", "3"});
    CHECK(r.exit_code == 0);
    CHECK(cli({"recommend", "--db", db.string(), "--person", "99999"}).exit_code == 1);
    CHECK(cli({"stats", "--db", (tmp / "missing").string()}).exit_code == 2);
  }

  TEST_CASE("remote runs need explicit consent") {
    testing::TempDir tmp("cli");
    save_catalog({RepoRecord{"a/b", "https://example.invalid/a/b.git", 10, 1, std::nullopt}}, tmp / "c.ndjson");
    auto r = cli({"run", "--catalog", (tmp / "c.ndjson").string(), "--db", (tmp / "d").string(), "--live"});
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("--i-own-these-repos") != std::string::npos);
    r = cli({"run", "--catalog", (tmp / "c.ndjson").string(), "--db", (tmp / "d").string()});
    CHECK(r.exit_code == 1);
    CHECK_FALSE(fs::exists(tmp / "d"));
  }

  TEST_CASE("rewrite-script output") {
    auto r = cli({"rewrite-script", "--old-email", "me@old.example", "--new-email", "1+me@users.noreply.github.com"});
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("#!/bin/sh", 0) == 0);
    CHECK(r.out.find("'me@old.example'") != std::string::npos);
    CHECK(cli({"rewrite-script", "--old-email", "", "--new-email", "x@y"}).exit_code == 1);
  }
}
