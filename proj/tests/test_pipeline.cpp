#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "gitaudit/errors.hpp"
#include "gitaudit/pipeline.hpp"
#include "gitaudit/process.hpp"
#include "test_support.hpp"

using namespace gitaudit;
namespace fs = std::filesystem;

namespace {

RepoRecord rec(std::string name, std::int64_t stars, std::int64_t size_kb, std::string url = "u") {
  return RepoRecord{std::move(name), std::move(url), stars, size_kb, std::nullopt};
}

std::vector<std::string> names(const std::vector<RepoRecord>& v) {
  std::vector<std::string> out;
  for (const auto& r : v) out.push_back(r.full_name);
  return out;
}

fs::path make_source_repo(const fs::path& dir) {
  fs::create_directories(dir);
  testing::git(dir, {"init", "-q", "-b", "main"});
  std::ofstream(dir / "f.txt") << "x\n";
  testing::git(dir, {"add", "f.txt"});
  testing::git(dir, {"-c", "user.name=Src", "-c", "user.email=src@x", "commit", "-q", "-m", "c"});
  return dir;
}

std::size_t count_dirs(const fs::path& dir) {
  std::size_t n = 0;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) n += e.is_directory();
  return n;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("score") {
    CHECK(SelectionPolicy::score(100, 10) == doctest::Approx(1.0));
    CHECK(SelectionPolicy::score(0, 10) == 0.0);
    CHECK(SelectionPolicy::score(25, 0) == doctest::Approx(5.0));
  }

  TEST_CASE("equal stars keep the smallest repositories") {
    std::vector<RepoRecord> cat;
    for (int mb = 5; mb >= 1; --mb) cat.push_back(rec("o/r" + std::to_string(mb), 1000, mb * 1024));
    auto sel = select_for_cloning(cat);
    CHECK(names(sel) == std::vector<std::string>{"o/r1", "o/r2"});
  }

  TEST_CASE("hand-computed ten-repository selection") {
    std::vector<RepoRecord> cat{rec("a/one", 100, 10),   rec("a/two", 400, 10),  rec("b/three", 9, 1),
                                rec("b/four", 0, 1),     rec("c/five", 10000, 50), rec("c/six", 25, 0),
                                rec("d/seven", 1, 2),    rec("d/eight", 16, 8),  rec("e/nine", 900, 100),
                                rec("e/ten", 49, 2)};
    CHECK(names(select_for_cloning(cat)) == std::vector<std::string>{"c/six", "e/ten", "b/three", "a/two"});
    CHECK(names(select_for_cloning(cat, {0.5})) ==
          std::vector<std::string>{"c/six", "e/ten", "b/three", "a/two", "c/five"});
    CHECK(select_for_cloning(cat, {1.0}).size() == 10);
    CHECK(select_for_cloning(cat, {0.01}).size() == 1);
  }

  TEST_CASE("ties break by name and inputs stay untouched") {
    std::vector<RepoRecord> cat{rec("b/y", 4, 2), rec("a/x", 4, 2)};
    auto copy = cat;
    auto sel = select_for_cloning(cat, {0.5});
    CHECK(names(sel) == std::vector<std::string>{"a/x"});
    CHECK(cat == copy);
    CHECK(select_for_cloning(cat, {0.5}) == sel);
  }

  TEST_CASE("selection on edge inputs") {
    CHECK(select_for_cloning({}).empty());
    CHECK(select_for_cloning({rec("s/one", 1, 1)}).size() == 1);
    CHECK_THROWS_AS(select_for_cloning({rec("s/one", 1, 1)}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(select_for_cloning({rec("s/one", 1, 1)}, {1.5}), std::invalid_argument);
  }

  TEST_CASE("selection agrees with a sort-based reference") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 30; ++round) {
      std::vector<RepoRecord> cat;
      const auto n = 1 + rng() % 60;
      for (std::size_t i = 0; i < n; ++i)
        cat.push_back(rec("o/r" + std::to_string(i), static_cast<std::int64_t>(rng() % 50),
                          static_cast<std::int64_t>(rng() % 6)));
      const double f = 0.05 + static_cast<double>(rng() % 95) / 100.0;
      auto ref = cat;
      std::stable_sort(ref.begin(), ref.end(), [](const RepoRecord& a, const RepoRecord& b) {
        double sa = std::sqrt(static_cast<double>(a.stars)) / static_cast<double>(std::max<std::int64_t>(a.size_kb, 1));
        double sb = std::sqrt(static_cast<double>(b.stars)) / static_cast<double>(std::max<std::int64_t>(b.size_kb, 1));
        return sa != sb ? sa > sb : a.full_name < b.full_name;
      });
      std::size_t keep = 0;
      while (static_cast<double>(keep) < f * static_cast<double>(n) - 1e-9) ++keep;
      keep = std::max<std::size_t>(keep, 1);
      ref.resize(keep);
      CHECK(select_for_cloning(cat, {f}) == ref);
    }
  }

  TEST_CASE("config validation") {
    PipelineConfig c;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.work_dir = "/tmp/x";
    CHECK_NOTHROW(c.validate());
    c.max_on_disk = 2;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }

  TEST_CASE("bounded disk usage over one hundred clones") {
    testing::TempDir tmp("pipe");
    auto src = make_source_repo(tmp / "src");
    std::vector<RepoRecord> sel;
    for (int i = 0; i < 100; ++i) sel.push_back(rec("o/r" + std::to_string(i), 10, 1, src.string()));

    PipelineConfig cfg;
    cfg.work_dir = tmp / "work";
    std::atomic<std::size_t> max_seen{0}, max_dirs{0};
    PipelineHooks hooks;
    hooks.on_disk_change = [&](std::size_t n) {
      max_seen = std::max(max_seen.load(), n);
      max_dirs = std::max(max_dirs.load(), count_dirs(cfg.work_dir));
    };
    std::set<std::string> sunk;
    auto stats = run_pipeline(
        sel, cfg,
        [&](const RepoRecord& r, const fs::path& p) {
          CHECK(fs::exists(p / ".git"));
          max_dirs = std::max(max_dirs.load(), count_dirs(cfg.work_dir));
          sunk.insert(r.full_name);
          return SinkResult{true, {}, 0.01, 0.02};
        },
        hooks);
    CHECK(stats.selected == 100);
    CHECK(stats.cloned == 100);
    CHECK(stats.failed == 0);
    CHECK(sunk.size() == 100);
    CHECK(stats.on_disk_high_water <= 20);
    CHECK(stats.on_disk_high_water >= 1);
    CHECK(max_seen <= 20);
    CHECK(max_dirs <= 20);
    CHECK(fs::is_empty(cfg.work_dir));
    CHECK(stats.wall_times.shortlog == doctest::Approx(1.0));
    CHECK(stats.wall_times.merge == doctest::Approx(2.0));
    CHECK(stats.wall_times.clone > 0);
  }

  TEST_CASE("empty selection") {
    testing::TempDir tmp("pipe");
    PipelineConfig cfg;
    cfg.work_dir = tmp / "work";
    bool called = false;
    auto stats = run_pipeline({}, cfg, [&](const RepoRecord&, const fs::path&) {
      called = true;
      return SinkResult{};
    });
    CHECK_FALSE(called);
    CHECK(stats.selected == 0);
    CHECK(stats.cloned == 0);
    CHECK(stats.failed == 0);
    CHECK(stats.on_disk_high_water == 0);
  }

  TEST_CASE("a failing clone is counted and the rest proceed") {
    testing::TempDir tmp("pipe");
    auto src = make_source_repo(tmp / "src");
    std::vector<RepoRecord> sel;
    for (int i = 0; i < 10; ++i)
      sel.push_back(rec("o/r" + std::to_string(i), 10, 1, i == 4 ? (tmp / "nope").string() : src.string()));
    PipelineConfig cfg;
    cfg.work_dir = tmp / "work";
    auto stats = run_pipeline(sel, cfg, [](const RepoRecord&, const fs::path&) { return SinkResult{}; });
    CHECK(stats.cloned == 9);
    CHECK(stats.failed == 1);
    REQUIRE(stats.failures.size() == 1);
    CHECK(stats.failures[0].full_name == "o/r4");
    CHECK(fs::is_empty(cfg.work_dir));
  }

  TEST_CASE("sink failures count as failed") {
    testing::TempDir tmp("pipe");
    auto src = make_source_repo(tmp / "src");
    std::vector<RepoRecord> sel{rec("o/a", 1, 1, src.string()), rec("o/b", 1, 1, src.string())};
    PipelineConfig cfg;
    cfg.work_dir = tmp / "work";
    auto stats = run_pipeline(sel, cfg, [](const RepoRecord& r, const fs::path&) -> SinkResult {
      if (r.full_name == "o/b") throw std::runtime_error("boom");
      return {};
    });
    CHECK(stats.cloned == 1);
    CHECK(stats.failed == 1);
    CHECK(fs::is_empty(cfg.work_dir));
  }

  TEST_CASE("unusable work dir") {
    testing::TempDir tmp("pipe");
    std::ofstream(tmp / "file") << "x";
    PipelineConfig cfg;
    cfg.work_dir = tmp / "file" / "sub";
    CHECK_THROWS_AS(run_pipeline({rec("o/a", 1, 1)}, cfg, [](const RepoRecord&, const fs::path&) { return SinkResult{}; }),
                    WorkDirError);
  }

  TEST_CASE("process timeout kills the child") {
    ProcessOptions opts;
    opts.timeout = std::chrono::milliseconds(200);
    const auto t0 = std::chrono::steady_clock::now();
    auto r = run_process({"sleep", "10"}, opts);
    CHECK(r.timed_out);
    CHECK_FALSE(r.ok());
    CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(5));
  }

  TEST_CASE("process plumbing") {
    ProcessOptions opts;
    opts.stdin_data = "hello";
    opts.env = {{"GA_TEST_VAR", "v1"}};
    auto r = run_process({"sh", "-c", "cat; printf %s \"$GA_TEST_VAR\"; echo err >&2; exit 3"}, opts);
    CHECK(r.exit_code == 3);
    CHECK(r.out == "hellov1");
    CHECK(r.err == "err\n");
  }

  TEST_CASE("local clone urls") {
    CHECK(is_local_clone_url("/tmp/repo"));
    CHECK(is_local_clone_url("file:///tmp/repo"));
    CHECK(is_local_clone_url("./a:b"));
    CHECK_FALSE(is_local_clone_url("https://github.com/a/b.git"));
    CHECK_FALSE(is_local_clone_url("git@github.com:a/b.git"));
  }
}
