#include "gitaudit/catalog.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "gitaudit/errors.hpp"

namespace gitaudit {

using nlohmann::json;

void RepoRecord::validate() const {
  if (full_name.empty() || std::count(full_name.begin(), full_name.end(), '/') != 1 ||
      full_name.front() == '/' || full_name.back() == '/')
    throw std::invalid_argument("full_name must be owner/name: '" + full_name + "'");
  if (clone_url.empty()) throw std::invalid_argument("empty clone_url for " + full_name);
  if (stars < 0 || size_kb < 0) throw std::invalid_argument("negative stars/size for " + full_name);
}

std::string RepoRecord::dir_name() const {
  auto slash = full_name.find('/');
  if (slash == std::string::npos) return full_name;
  return full_name.substr(0, slash) + "__" + full_name.substr(slash + 1);
}

std::string StarWindow::label() const {
  return upper_bound ? std::to_string(*upper_bound) : std::string("open");
}

std::string next_star_query(const StarWindow& window) {
  if (!window.upper_bound) return "stars:>=" + std::to_string(window.lower_bound);
  return "stars:" + std::to_string(window.lower_bound) + ".." + std::to_string(*window.upper_bound);
}

namespace {

RepoRecord record_from_json(const json& item) {
  RepoRecord r;
  r.full_name = item.at("full_name").get<std::string>();
  r.clone_url = item.at("clone_url").get<std::string>();
  r.stars = item.at("stargazers_count").get<std::int64_t>();
  r.size_kb = item.at("size").get<std::int64_t>();
  if (auto it = item.find("language"); it != item.end() && !it->is_null())
    r.main_language = it->get<std::string>();
  r.validate();
  return r;
}

json record_to_json(const RepoRecord& r) {
  json j;
  j["full_name"] = r.full_name;
  j["clone_url"] = r.clone_url;
  j["stargazers_count"] = r.stars;
  j["size"] = r.size_kb;
  j["language"] = r.main_language ? json(*r.main_language) : json(nullptr);
  return j;
}

}  // namespace

SearchPage parse_search_page(const std::string& json_text) {
  SearchPage page;
  try {
    json doc = json::parse(json_text);
    page.total_count = doc.value("total_count", std::int64_t{0});
    for (const auto& item : doc.at("items")) page.items.push_back(record_from_json(item));
  } catch (const json::exception& e) {
    throw FixtureError(std::string("malformed search page: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FixtureError(std::string("invalid repository in search page: ") + e.what());
  }
  return page;
}

std::string search_page_to_json(const SearchPage& page) {
  json doc;
  doc["total_count"] = page.total_count;
  doc["incomplete_results"] = false;
  doc["items"] = json::array();
  for (const auto& r : page.items) doc["items"].push_back(record_to_json(r));
  return doc.dump(1);
}

// ---------------------------------------------------------------------------
// Fixture source

FixtureSource::FixtureSource(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_))
    throw FixtureError("fixture directory not found: " + dir_.string());
}

std::filesystem::path FixtureSource::page_path(const std::filesystem::path& dir,
                                               const StarWindow& window, int page) {
  return dir / ("page-" + window.label() + "-" + std::to_string(page) + ".json");
}

SearchPage FixtureSource::fetch_page(const StarWindow& window, int page, int /*per_page*/) {
  auto path = page_path(dir_, window, page);
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_search_page(ss.str());
  } catch (const FixtureError& e) {
    throw FixtureError(path.filename().string() + ": " + e.what());
  }
}

int write_search_fixture(std::vector<RepoRecord> corpus, const std::filesystem::path& dir,
                         const RateBudget& budget) {
  std::filesystem::create_directories(dir);
  std::sort(corpus.begin(), corpus.end(), [](const RepoRecord& a, const RepoRecord& b) {
    return a.stars != b.stars ? a.stars > b.stars : a.full_name < b.full_name;
  });
  int pages_written = 0;
  StarWindow window;
  std::unordered_set<std::string> seen;
  for (;;) {
    std::vector<RepoRecord> matches;
    for (const auto& r : corpus)
      if (r.stars >= window.lower_bound && (!window.upper_bound || r.stars <= *window.upper_bound))
        matches.push_back(r);
    const auto total = static_cast<std::int64_t>(matches.size());
    if (matches.size() > static_cast<std::size_t>(budget.results_per_search))
      matches.resize(static_cast<std::size_t>(budget.results_per_search));

    std::size_t fresh = 0;
    for (const auto& r : matches) fresh += seen.insert(r.full_name).second;
    for (std::size_t off = 0, k = 1; off < matches.size();
         off += static_cast<std::size_t>(budget.results_per_page), ++k) {
      SearchPage page;
      page.total_count = total;
      auto end = std::min(matches.size(), off + static_cast<std::size_t>(budget.results_per_page));
      page.items.assign(matches.begin() + static_cast<std::ptrdiff_t>(off),
                        matches.begin() + static_cast<std::ptrdiff_t>(end));
      std::ofstream out(FixtureSource::page_path(dir, window, static_cast<int>(k)));
      out << search_page_to_json(page) << '\n';
      if (!out) throw IoError("cannot write fixture page in " + dir.string());
      ++pages_written;
    }
    if (total <= budget.results_per_search || fresh == 0) break;
    window.upper_bound = matches.back().stars;
  }
  return pages_written;
}

// ---------------------------------------------------------------------------
// Rate limiting

void SystemClock::sleep_for(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

RateLimiter::RateLimiter(int requests_per_minute, Clock& clock)
    : limit_(requests_per_minute), clock_(clock) {
  if (limit_ <= 0) throw std::invalid_argument("rate limit must be positive");
}

void RateLimiter::acquire() {
  constexpr auto kWindow = std::chrono::minutes(1);
  auto now = clock_.now();
  while (!window_.empty() && now - window_.front() >= kWindow) window_.pop_front();
  if (static_cast<int>(window_.size()) >= limit_) {
    auto wait = std::chrono::ceil<std::chrono::milliseconds>(window_.front() + kWindow - now);
    clock_.sleep_for(wait);
    now = clock_.now();
    while (!window_.empty() && now - window_.front() >= kWindow) window_.pop_front();
  }
  window_.push_back(now);
  history_.push_back(now);
}

// ---------------------------------------------------------------------------
// Live source

LiveSource::LiveSource(LiveOptions opts, RateBudget budget, Clock& clock)
    : opts_(std::move(opts)), clock_(clock), limiter_(budget.search_requests_per_minute, clock) {
  if (opts_.token.empty()) {
    if (const char* env = std::getenv("GIT_AUDIT_TOKEN")) opts_.token = env;
  }
  if (opts_.token.empty())
    throw AuthError("live mode requires an API token in GIT_AUDIT_TOKEN");
}

LiveSource::~LiveSource() = default;

SearchPage LiveSource::fetch_page(const StarWindow& window, int page, int per_page) {
  httplib::Params params{{"q", next_star_query(window)},
                         {"sort", "stars"},
                         {"order", "desc"},
                         {"page", std::to_string(page)},
                         {"per_page", std::to_string(per_page)}};
  httplib::Headers headers{{"Authorization", "token " + opts_.token},
                           {"Accept", "application/vnd.github+json"},
                           {"User-Agent", "git-audit"}};

  std::string last_error;
  auto backoff = opts_.first_backoff;
  for (int attempt = 0; attempt <= opts_.retries; ++attempt) {
    if (attempt > 0) {
      clock_.sleep_for(backoff);
      backoff *= 2;
    }
    limiter_.acquire();
    httplib::Client client(opts_.base_url);
    client.set_connection_timeout(opts_.request_timeout);
    client.set_read_timeout(opts_.request_timeout);
    auto res = client.Get("/search/repositories", params, headers);
    if (!res) {
      last_error = "transport: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401) throw AuthError("search API rejected the token (401)");
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      return parse_search_page(res->body);
    } catch (const FixtureError& e) {
      last_error = e.what();
    }
  }
  throw TransportError("search page " + std::to_string(page) + " for '" +
                       next_star_query(window) + "' failed after " +
                       std::to_string(opts_.retries + 1) + " attempts: " + last_error);
}

// ---------------------------------------------------------------------------

std::vector<RepoRecord> fetch_top(int n, CatalogSource& source, const RateBudget& budget,
                                  FetchLog* log) {
  if (n < 1) throw std::invalid_argument("fetch_top: n must be >= 1");
  const int max_pages = (budget.results_per_search + budget.results_per_page - 1) /
                        budget.results_per_page;
  std::vector<RepoRecord> out;
  std::unordered_set<std::string> seen;
  StarWindow window;

  while (static_cast<int>(out.size()) < n) {
    if (log) log->windows.push_back(window);
    std::int64_t total = 0;
    std::int64_t lowest = -1;
    std::size_t fresh = 0;
    int page_no = 1;
    for (; page_no <= max_pages && static_cast<int>(out.size()) < n; ++page_no) {
      SearchPage page = source.fetch_page(window, page_no, budget.results_per_page);
      if (log) ++log->page_requests;
      total = page.total_count;
      for (auto& r : page.items) {
        lowest = r.stars;
        if (seen.insert(r.full_name).second) {
          out.push_back(std::move(r));
          ++fresh;
          if (static_cast<int>(out.size()) == n) break;
        }
      }
      const auto served = static_cast<std::int64_t>(page_no) * budget.results_per_page;
      if (page.items.size() < static_cast<std::size_t>(budget.results_per_page) ||
          served >= std::min<std::int64_t>(total, budget.results_per_search))
        break;
    }
    if (log) log->window_totals.push_back(total);
    // Window not capped: the corpus is exhausted. No new names: ties beyond
    // the cap cannot be paged past.
    if (total <= budget.results_per_search || fresh == 0 || lowest < 0) break;
    if (static_cast<int>(out.size()) >= n) break;
    window.upper_bound = lowest;
  }
  if (static_cast<int>(out.size()) > n) out.resize(static_cast<std::size_t>(n));
  return out;
}

// ---------------------------------------------------------------------------

void save_catalog(const std::vector<RepoRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<RepoRecord> load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<RepoRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw CorruptRecord(line_no, e.what());
    }
  }
  return out;
}

}  // namespace gitaudit
