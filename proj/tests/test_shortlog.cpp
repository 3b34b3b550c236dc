#include <doctest.h>

#include <cstdio>
#include <random>

#include "gitaudit/errors.hpp"
#include "gitaudit/shortlog.hpp"
#include "test_support.hpp"

using namespace gitaudit;
namespace fs = std::filesystem;

namespace {

// What git prints for one author row.
std::string format_row(const ShortlogLine& l) {
  char count[32];
  std::snprintf(count, sizeof count, "%6lld", static_cast<long long>(l.commits));
  return std::string(count) + "\t" + l.name + " <" + l.email + ">";
}

void commit_as(const fs::path& repo, const std::string& name, const std::string& email, int times = 1) {
  for (int i = 0; i < times; ++i)
    testing::git(repo, {"-c", "user.name=" + name, "-c", "user.email=" + email, "commit", "-q",
                        "--allow-empty", "-m", "m"});
}

std::string git_stdin(const fs::path& repo, const std::vector<std::string>& args, const std::string& input) {
  std::vector<std::string> argv{"git"};
  argv.insert(argv.end(), args.begin(), args.end());
  ProcessOptions o;
  o.cwd = repo;
  o.stdin_data = input;
  auto r = run_process(argv, o);
  if (r.exit_code != 0) throw std::runtime_error(r.err);
  auto out = r.out;
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

}  // namespace

TEST_SUITE("shortlog") {
  TEST_CASE("plain rows") {
    auto p = parse_shortlog("    12\tJane Doe <jane@example.org>\n     3\tbob <12345+bob@users.noreply.github.com>\n");
    REQUIRE(p.lines.size() == 2);
    CHECK(p.warnings.empty());
    CHECK(p.lines[0] == ShortlogLine{12, "Jane Doe", "jane@example.org"});
    CHECK(p.lines[1] == ShortlogLine{3, "bob", "12345+bob@users.noreply.github.com"});
  }

  TEST_CASE("angle bracket inside the name") {
    auto p = parse_shortlog("     1\tweird <name <a@b.c>\n");
    REQUIRE(p.lines.size() == 1);
    CHECK(p.lines[0] == ShortlogLine{1, "weird <name", "a@b.c"});
  }

  TEST_CASE("empty name and empty email") {
    auto p = parse_shortlog("     1\t <e@x>\n     2\tN <>\n");
    REQUIRE(p.lines.size() == 2);
    CHECK(p.lines[0] == ShortlogLine{1, "", "e@x"});
    CHECK(p.lines[1] == ShortlogLine{2, "N", ""});
  }

  TEST_CASE("malformed rows become warnings") {
    auto p = parse_shortlog("garbage\n     0\tZero <z@x>\n    x\tA <a@b>\n     4\tNoEmail\n\n   \n     5\tOk <ok@x>\r\n");
    REQUIRE(p.lines.size() == 1);
    CHECK(p.lines[0] == ShortlogLine{5, "Ok", "ok@x"});
    REQUIRE(p.warnings.size() == 4);
    CHECK(p.warnings[0].line_no == 1);
    CHECK(p.warnings[1].line_no == 2);
    CHECK(p.warnings[3].text == "     4\tNoEmail");
  }

  TEST_CASE("formatted rows round-trip") {
    std::mt19937_64 rng(21);
    const std::string alphabet = "abcXYZ019 .-_'<@\xc3\xa9";
    for (int round = 0; round < 300; ++round) {
      std::vector<ShortlogLine> lines;
      std::string text;
      const auto n = rng() % 8;
      for (std::size_t i = 0; i < n; ++i) {
        ShortlogLine l;
        l.commits = 1 + static_cast<std::int64_t>(rng() % 100000);
        for (auto k = rng() % 12; k > 0; --k) l.name += alphabet[rng() % alphabet.size()];
        // git trims names; keep ours trimmed so the row is what git would print
        while (!l.name.empty() && l.name.back() == ' ') l.name.pop_back();
        while (!l.name.empty() && l.name.front() == ' ') l.name.erase(0, 1);
        for (auto k = rng() % 12; k > 0; --k) {
          char c = alphabet[rng() % alphabet.size()];
          if (c != '<') l.email += c;
        }
        lines.push_back(l);
        text += format_row(l) + "\n";
      }
      auto p = parse_shortlog(text);
      CHECK(p.warnings.empty());
      CHECK(p.lines == lines);
    }
  }

  TEST_CASE("parsing is total over arbitrary bytes") {
    std::mt19937_64 rng(22);
    for (int round = 0; round < 2000; ++round) {
      std::string s;
      for (auto k = rng() % 80; k > 0; --k) {
        const auto r = rng() % 10;
        s += r < 2 ? '\n' : r < 3 ? '\t' : r < 4 ? '<' : r < 5 ? '>' : r < 6 ? ' ' : static_cast<char>(rng() % 256);
      }
      ShortlogParse p;
      CHECK_NOTHROW(p = parse_shortlog(s));
      std::size_t nonblank = 0;
      std::size_t start = 0;
      while (start <= s.size()) {
        auto nl = s.find('\n', start);
        auto row = s.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
        if (!row.empty() && row.back() == '\r') row.pop_back();
        nonblank += row.find_first_not_of(" \t") != std::string::npos;
        if (nl == std::string::npos) break;
        start = nl + 1;
      }
      CHECK(p.lines.size() + p.warnings.size() == nonblank);
    }
  }

  TEST_CASE("utf8 helpers") {
    CHECK(is_valid_utf8("J\xc3\xa9r\xc3\xb4me"));
    CHECK_FALSE(is_valid_utf8("bad\xff"));
    CHECK_FALSE(is_valid_utf8("\xc0\xaf"));
    CHECK(to_display_utf8("a\xffz") == "a\xef\xbf\xbdz");
    CHECK(to_display_utf8("plain") == "plain");
  }

  TEST_CASE("collect from real repositories") {
    testing::TempDir tmp("sl");
    auto repo = tmp / "r";
    fs::create_directories(repo);
    testing::git(repo, {"init", "-q", "-b", "main"});
    CHECK(collect_shortlog(repo).empty());

    commit_as(repo, "Ann", "ann@x.org", 3);
    auto one = parse_shortlog(collect_shortlog(repo));
    REQUIRE(one.lines.size() == 1);
    CHECK(one.lines[0] == ShortlogLine{3, "Ann", "ann@x.org"});

    commit_as(repo, "Ann", "ann@work.example");
    commit_as(repo, "Bo", "12+bo@users.noreply.github.com", 5);
    auto three = parse_shortlog(collect_shortlog(repo));
    CHECK(three.warnings.empty());
    REQUIRE(three.lines.size() == 3);
    CHECK(three.lines[0] == ShortlogLine{5, "Bo", "12+bo@users.noreply.github.com"});
    CHECK(three.lines[1] == ShortlogLine{3, "Ann", "ann@x.org"});
    CHECK(three.lines[2] == ShortlogLine{1, "Ann", "ann@work.example"});
  }

  TEST_CASE("collect keeps odd identities intact") {
    testing::TempDir tmp("sl");
    auto repo = tmp / "r";
    fs::create_directories(repo);
    testing::git(repo, {"init", "-q", "-b", "main"});
    const auto tree = git_stdin(repo, {"hash-object", "-t", "tree", "-w", "--stdin"}, "");
    const auto commit = git_stdin(repo, {"hash-object", "-t", "commit", "-w", "--literally", "--stdin"},
                                  "tree " + tree +
                                      "\nauthor weird <name <a@b.c> 1500000000 +0000\n"
                                      "committer c <c@d> 1500000000 +0000\n\nm\n");
    testing::git(repo, {"update-ref", "refs/heads/main", commit});
    auto p = parse_shortlog(collect_shortlog(repo));
    REQUIRE(p.lines.size() == 1);
    CHECK(p.lines[0] == ShortlogLine{1, "weird <name", "a@b.c"});
  }

  TEST_CASE("collect rejects non-repositories") {
    testing::TempDir tmp("sl");
    CHECK_THROWS_AS(collect_shortlog(tmp.path()), NotARepository);
    CHECK_THROWS_AS(collect_shortlog(tmp / "missing"), NotARepository);
  }
}
