#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gitaudit {

/// One search-API repository entry, restricted to the five fields we consume.
struct RepoRecord {
  std::string full_name;  // owner/name
  std::string clone_url;
  std::int64_t stars = 0;
  std::int64_t size_kb = 0;
  std::optional<std::string> main_language;

  bool operator==(const RepoRecord&) const = default;

  /// Throws std::invalid_argument when a field invariant does not hold.
  void validate() const;
  /// "<owner>__<name>", used for on-disk directory names.
  std::string dir_name() const;
};

/// Star-count range the search qualifier covers. The upper bound is absent
/// for the first window and becomes the lowest star count of the previous
/// exhausted window afterwards.
struct StarWindow {
  static constexpr std::int64_t kLowerBound = 5;
  std::int64_t lower_bound = kLowerBound;
  std::optional<std::int64_t> upper_bound;

  bool valid() const { return !upper_bound || *upper_bound >= lower_bound; }
  /// Fixture file label: "open" or the upper bound.
  std::string label() const;
};

struct RateBudget {
  int search_requests_per_minute = 30;
  int results_per_page = 100;
  int results_per_search = 1000;  // search API hard cap per query
};

std::string next_star_query(const StarWindow& window);

struct SearchPage {
  std::int64_t total_count = 0;  // matches for the whole query, not just this page
  std::vector<RepoRecord> items;
};

/// Where search pages come from. `page` is 1-based.
class CatalogSource {
 public:
  virtual ~CatalogSource() = default;
  virtual SearchPage fetch_page(const StarWindow& window, int page, int per_page) = 0;
};

/// Replays `page-<window>-<k>.json` files. A missing file is an empty page.
class FixtureSource : public CatalogSource {
 public:
  explicit FixtureSource(std::filesystem::path dir);
  SearchPage fetch_page(const StarWindow& window, int page, int per_page) override;

  static std::filesystem::path page_path(const std::filesystem::path& dir,
                                         const StarWindow& window, int page);

 private:
  std::filesystem::path dir_;
};

/// Time source used for rate limiting and retry backoff; replaceable in tests.
class Clock {
 public:
  using time_point = std::chrono::steady_clock::time_point;
  virtual ~Clock() = default;
  virtual time_point now() = 0;
  virtual void sleep_for(std::chrono::milliseconds d) = 0;
};

class SystemClock : public Clock {
 public:
  time_point now() override { return std::chrono::steady_clock::now(); }
  void sleep_for(std::chrono::milliseconds d) override;
};

/// Sliding-window limiter: no 60 s interval ever contains more than
/// `requests_per_minute` acquisitions.
class RateLimiter {
 public:
  RateLimiter(int requests_per_minute, Clock& clock);
  void acquire();
  const std::vector<Clock::time_point>& history() const { return history_; }

 private:
  int limit_;
  Clock& clock_;
  std::deque<Clock::time_point> window_;
  std::vector<Clock::time_point> history_;
};

struct LiveOptions {
  std::string base_url = "https://api.github.com";
  std::string token;  // taken from GIT_AUDIT_TOKEN when empty
  int retries = 3;    // after the first attempt; backoff doubles from 1 s
  std::chrono::milliseconds first_backoff{1000};
  std::chrono::seconds request_timeout{30};
};

/// Queries GET /search/repositories?q=<qualifier>&sort=stars&order=desc&page=k&per_page=100.
class LiveSource : public CatalogSource {
 public:
  /// Throws AuthError when no token is configured.
  LiveSource(LiveOptions opts, RateBudget budget, Clock& clock);
  ~LiveSource() override;
  SearchPage fetch_page(const StarWindow& window, int page, int per_page) override;

  const RateLimiter& limiter() const { return limiter_; }

 private:
  LiveOptions opts_;
  Clock& clock_;
  RateLimiter limiter_;
};

/// Parses one search response body ({"items": [...]}). Throws FixtureError.
SearchPage parse_search_page(const std::string& json_text);
std::string search_page_to_json(const SearchPage& page);

struct FetchLog {
  int page_requests = 0;
  std::vector<StarWindow> windows;  // every window queried, in order
  std::vector<std::int64_t> window_totals;  // total_count reported per window
};

/// Top-n repositories by descending stars, walking star windows past the
/// per-search result cap. Records seen in an earlier window are kept once.
std::vector<RepoRecord> fetch_top(int n, CatalogSource& source, const RateBudget& budget = {},
                                  FetchLog* log = nullptr);

/// Writes the page files a search over `corpus` would return, window by
/// window, so FixtureSource replays exactly what the live API would answer
/// (descending stars, ties by name). Returns the number of pages written.
int write_search_fixture(std::vector<RepoRecord> corpus, const std::filesystem::path& dir,
                         const RateBudget& budget = {});

// Newline-delimited catalog files (one JSON object per record).
void save_catalog(const std::vector<RepoRecord>& records, const std::filesystem::path& path);
std::vector<RepoRecord> load_catalog(const std::filesystem::path& path);

}  // namespace gitaudit
