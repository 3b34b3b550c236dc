#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gitaudit/catalog.hpp"

namespace gitaudit {

struct SelectionPolicy {
  double keep_fraction = 0.4;

  /// sqrt(stars) / max(size_kb, 1). Zero-star repositories score 0.
  static double score(std::int64_t stars, std::int64_t size_kb);
};

/// The ceil(keep_fraction * |catalog|) highest-scoring repositories, by
/// descending score, ties by ascending full_name.
std::vector<RepoRecord> select_for_cloning(const std::vector<RepoRecord>& catalog,
                                           const SelectionPolicy& policy = {});

struct PipelineConfig {
  std::size_t max_on_disk = 20;
  std::size_t cloner_workers = 4;
  std::chrono::seconds per_repo_timeout{300};
  std::filesystem::path work_dir;

  void validate() const;
};

struct PhaseTimes {
  double fetch = 0;     // filled in by the caller that did the fetching
  double clone = 0;     // summed over workers
  double shortlog = 0;  // as reported by the sink
  double merge = 0;
  double total = 0;     // wall time of run_pipeline
};

struct RepoFailure {
  std::string full_name;
  std::string reason;
};

struct PipelineStats {
  std::size_t fetched = 0;
  std::size_t selected = 0;
  std::size_t cloned = 0;
  std::size_t failed = 0;
  std::size_t on_disk_high_water = 0;
  PhaseTimes wall_times;
  std::vector<RepoFailure> failures;
};

/// What the analysis callback reports back per repository.
struct SinkResult {
  bool ok = true;
  std::string error;
  double shortlog_seconds = 0;
  double merge_seconds = 0;
};

using RepoSink = std::function<SinkResult(const RepoRecord&, const std::filesystem::path&)>;

struct PipelineHooks {
  /// Called (from any thread, serialized) whenever the number of repository
  /// directories under work_dir changes, with the new count.
  std::function<void(std::size_t)> on_disk_change;
};

/// Clones each selected repository with `cloner_workers` threads and hands
/// it to `sink` on the calling thread, deleting the clone once the sink
/// returns. At most max_on_disk clones exist at any instant. Per-repository
/// failures are counted, never thrown. Throws WorkDirError when work_dir is
/// unusable.
PipelineStats run_pipeline(const std::vector<RepoRecord>& selection, const PipelineConfig& config,
                           const RepoSink& sink, const PipelineHooks& hooks = {});

/// True when the clone URL refers to the local filesystem (path or file://).
bool is_local_clone_url(const std::string& url);

}  // namespace gitaudit
