#include "gitaudit/report.hpp"

#include <json.hpp>
#include <cctype>
#include <sstream>

#include "gitaudit/shortlog.hpp"

namespace gitaudit {

namespace {

bool ends_with_ci(std::string_view s, std::string_view suffix) {
  if (suffix.size() > s.size()) return false;
  auto tail = s.substr(s.size() - suffix.size());
  for (std::size_t i = 0; i < suffix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(tail[i])) != std::tolower(static_cast<unsigned char>(suffix[i])))
      return false;
  return true;
}

}  // namespace

bool passes(const Person& p, const AuditFilters& f) {
  if (f.compromised_only && !is_compromised(p)) return false;
  if (f.repository && !p.contributions.contains(*f.repository)) return false;
  if (f.domain) {
    std::string suffix = *f.domain;
    if (suffix.empty() || suffix.front() != '@') suffix.insert(suffix.begin(), '@');
    bool any = false;
    for (const auto& e : p.emails) any |= ends_with_ci(normalize_email(e), suffix);
    if (!any) return false;
  }
  return true;
}

ExposureReport audit(const PersonDatabase& db, const AuditFilters& filters, const AuditOptions& opts) {
  ExposureReport report;
  for (const Person* p : db.persons()) {
    if (!passes(*p, filters)) continue;
    ExposureEntry e;
    e.id = p->id;
    e.names = p->names;
    e.exposed_emails = p->emails;
    e.usernames = p->usernames;
    e.compromised = is_compromised(*p);
    e.repositories = p->contributions;
    if (opts.graph) e.recommendation_count = recommend(*opts.graph, *p, opts.recommend_k).size();
    e.possibly_overmerged = p->emails.size() > 10;
    report.entries.push_back(std::move(e));
  }
  if (!db.empty()) report.summary = database_stats(db, opts.pipeline);
  return report;
}

namespace {

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& v : s) {
    if (!out.empty()) out += ", ";
    out += to_display_utf8(v);
  }
  return out.empty() ? "-" : out;
}

}  // namespace

std::string report_to_text(const ExposureReport& report) {
  std::ostringstream os;
  for (const auto& e : report.entries) {
    os << "person " << e.id << (e.compromised ? "  [COMPROMISED]" : "")
       << (e.possibly_overmerged ? "  [possible over-merge]" : "") << '\n';
    os << "  names:     " << join(e.names) << '\n';
    os << "  emails:    " << join(e.exposed_emails) << '\n';
    os << "  usernames: " << join(e.usernames) << '\n';
    os << "  repos:    ";
    for (const auto& [repo, n] : e.repositories) os << ' ' << repo << '(' << n << ')';
    os << '\n';
    if (e.recommendation_count) os << "  recommendations: " << e.recommendation_count << '\n';
  }
  os << "entries: " << report.entries.size() << '\n';
  if (report.summary) {
    const auto& s = *report.summary;
    os << "total persons:     " << s.total_persons << '\n'
       << ">= 2 repos:        " << format_pct(s.persons_ge2_repos_pct) << '\n'
       << ">= 5 commits:      " << format_pct(s.persons_ge5_commits_pct) << '\n'
       << "shortlog lines:    " << s.shortlog_lines_total << '\n'
       << "noreply enabled:   " << format_pct(s.noreply_enabled_pct) << '\n'
       << "still compromised: " << format_pct(s.compromised_pct) << '\n'
       << "failed repos:      " << format_pct(s.failed_repos_pct) << '\n';
  }
  return os.str();
}

std::string report_to_ndjson(const ExposureReport& report) {
  using nlohmann::ordered_json;
  auto strings = [](const std::set<std::string>& s) {
    ordered_json a = ordered_json::array();
    for (const auto& v : s) a.push_back(to_display_utf8(v));
    return a;
  };
  std::string out;
  for (const auto& e : report.entries) {
    ordered_json j;
    j["id"] = e.id;
    j["names"] = strings(e.names);
    j["emails"] = strings(e.exposed_emails);
    j["usernames"] = strings(e.usernames);
    j["compromised"] = e.compromised;
    ordered_json repos = ordered_json::object();
    for (const auto& [repo, n] : e.repositories) repos[to_display_utf8(repo)] = n;
    j["repositories"] = std::move(repos);
    j["recommendations"] = e.recommendation_count;
    j["possibly_overmerged"] = e.possibly_overmerged;
    out += j.dump() + '\n';
  }
  if (report.summary) {
    const auto& s = *report.summary;
    ordered_json j;
    j["summary"] = {{"total_persons", s.total_persons},
                    {"persons_ge2_repos_pct", round_pct(s.persons_ge2_repos_pct)},
                    {"persons_ge5_commits_pct", round_pct(s.persons_ge5_commits_pct)},
                    {"shortlog_lines_total", s.shortlog_lines_total},
                    {"noreply_enabled_pct", round_pct(s.noreply_enabled_pct)},
                    {"compromised_pct", round_pct(s.compromised_pct)},
                    {"failed_repos_pct", round_pct(s.failed_repos_pct)}};
    out += j.dump() + '\n';
  }
  return out;
}

}  // namespace gitaudit
