#include "gitaudit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <mutex>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <thread>

#include "gitaudit/errors.hpp"
#include "gitaudit/process.hpp"

namespace gitaudit {

namespace fs = std::filesystem;

double SelectionPolicy::score(std::int64_t stars, std::int64_t size_kb) {
  return std::sqrt(static_cast<double>(std::max<std::int64_t>(stars, 0))) /
         static_cast<double>(std::max<std::int64_t>(size_kb, 1));
}

std::vector<RepoRecord> select_for_cloning(const std::vector<RepoRecord>& catalog,
                                           const SelectionPolicy& policy) {
  if (!(policy.keep_fraction > 0.0 && policy.keep_fraction <= 1.0))
    throw std::invalid_argument("keep_fraction must be in (0, 1]");
  if (catalog.empty()) return {};

  struct Scored {
    double score;
    const RepoRecord* repo;
  };
  std::vector<Scored> scored;
  scored.reserve(catalog.size());
  for (const auto& r : catalog) scored.push_back({SelectionPolicy::score(r.stars, r.size_kb), &r});
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.repo->full_name < b.repo->full_name;
  });

  // ceil(f * n) without the float noise that 0.4 * 5 = 2.0000000000000004 would add.
  const auto n = static_cast<long double>(catalog.size());
  auto keep = static_cast<std::size_t>(std::ceil(static_cast<long double>(policy.keep_fraction) * n - 1e-9L));
  keep = std::clamp<std::size_t>(keep, 1, catalog.size());

  std::vector<RepoRecord> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(*scored[i].repo);
  return out;
}

void PipelineConfig::validate() const {
  if (max_on_disk == 0) throw std::invalid_argument("max_on_disk must be positive");
  if (cloner_workers == 0) throw std::invalid_argument("cloner_workers must be positive");
  if (max_on_disk < cloner_workers)
    throw std::invalid_argument("max_on_disk must be >= cloner_workers");
  if (per_repo_timeout.count() <= 0) throw std::invalid_argument("per_repo_timeout must be > 0");
  if (work_dir.empty()) throw std::invalid_argument("work_dir is required");
}

bool is_local_clone_url(const std::string& url) {
  if (url.rfind("file://", 0) == 0) return true;
  if (url.find("://") != std::string::npos) return false;
  // scp-like "host:path" syntax is remote unless it is an absolute/relative path
  auto colon = url.find(':');
  auto slash = url.find('/');
  return colon == std::string::npos || (slash != std::string::npos && slash < colon);
}

namespace {

using SteadyClock = std::chrono::steady_clock;

double seconds_since(SteadyClock::time_point t0) {
  return std::chrono::duration<double>(SteadyClock::now() - t0).count();
}

void ensure_work_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw WorkDirError("cannot create work dir " + dir.string() + ": " + ec.message());
  auto probe = dir / ".write-probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "x")) throw WorkDirError("work dir not writable: " + dir.string());
  }
  fs::remove(probe, ec);
}

struct CloneMessage {
  std::size_t index;
  bool ok;
  fs::path path;
  std::string error;
  double clone_seconds;
};

class Handoff {
 public:
  void push(CloneMessage m) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(m));
    }
    cv_.notify_one();
  }
  CloneMessage pop() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !queue_.empty(); });
    auto m = std::move(queue_.front());
    queue_.pop_front();
    return m;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<CloneMessage> queue_;
};

class DiskCounter {
 public:
  explicit DiskCounter(const PipelineHooks& hooks) : hooks_(hooks) {}
  void add(long delta) {
    std::lock_guard lock(mu_);
    count_ = static_cast<std::size_t>(static_cast<long>(count_) + delta);
    high_water_ = std::max(high_water_, count_);
    if (hooks_.on_disk_change) hooks_.on_disk_change(count_);
  }
  std::size_t high_water() const {
    std::lock_guard lock(mu_);
    return high_water_;
  }

 private:
  const PipelineHooks& hooks_;
  mutable std::mutex mu_;
  std::size_t count_ = 0;
  std::size_t high_water_ = 0;
};

void remove_tree(const fs::path& p) {
  std::error_code ec;
  fs::remove_all(p, ec);
}

}  // namespace

PipelineStats run_pipeline(const std::vector<RepoRecord>& selection, const PipelineConfig& config,
                           const RepoSink& sink, const PipelineHooks& hooks) {
  config.validate();
  ensure_work_dir(config.work_dir);

  PipelineStats stats;
  stats.selected = selection.size();
  if (selection.empty()) return stats;

  const auto run_start = SteadyClock::now();
  std::counting_semaphore<1 << 20> slots(static_cast<std::ptrdiff_t>(config.max_on_disk));
  std::atomic<std::size_t> next{0};
  Handoff handoff;
  DiskCounter disk(hooks);

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= selection.size()) return;
      const RepoRecord& repo = selection[i];
      slots.acquire();
      const fs::path dest = config.work_dir / repo.dir_name();
      remove_tree(dest);
      disk.add(+1);
      const auto t0 = SteadyClock::now();
      CloneMessage msg{i, false, dest, {}, 0};
      try {
        ProcessOptions opts;
        opts.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(config.per_repo_timeout);
        opts.env = {{"GIT_TERMINAL_PROMPT", "0"}};
        auto res = run_process(
            {"git", "clone", "--quiet", "--no-checkout", "--", repo.clone_url, dest.string()}, opts);
        if (res.timed_out)
          msg.error = "clone timed out after " + std::to_string(config.per_repo_timeout.count()) + " s";
        else if (res.exit_code != 0)
          msg.error = "clone exited " + std::to_string(res.exit_code) + ": " + res.err;
        else
          msg.ok = true;
      } catch (const std::exception& e) {
        msg.error = std::string("clone could not start: ") + e.what();
      }
      msg.clone_seconds = seconds_since(t0);
      if (!msg.ok) {
        remove_tree(dest);
        disk.add(-1);
        slots.release();
      }
      handoff.push(std::move(msg));
    }
  };

  std::vector<std::jthread> workers;
  const auto n_workers = std::min(config.cloner_workers, selection.size());
  for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);

  // Single consumer: the only place that touches the sink.
  for (std::size_t done = 0; done < selection.size(); ++done) {
    CloneMessage msg = handoff.pop();
    const RepoRecord& repo = selection[msg.index];
    stats.wall_times.clone += msg.clone_seconds;
    if (!msg.ok) {
      ++stats.failed;
      stats.failures.push_back({repo.full_name, msg.error});
      continue;
    }
    SinkResult result;
    try {
      result = sink(repo, msg.path);
    } catch (const std::exception& e) {
      result.ok = false;
      result.error = std::string("analysis threw: ") + e.what();
    }
    stats.wall_times.shortlog += result.shortlog_seconds;
    stats.wall_times.merge += result.merge_seconds;
    remove_tree(msg.path);
    disk.add(-1);
    slots.release();
    if (result.ok) {
      ++stats.cloned;
    } else {
      ++stats.failed;
      stats.failures.push_back({repo.full_name, result.error});
    }
  }
  workers.clear();

  stats.on_disk_high_water = disk.high_water();
  stats.wall_times.total = seconds_since(run_start);
  return stats;
}

}  // namespace gitaudit
