#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gitaudit/analytics.hpp"
#include "gitaudit/coherence.hpp"
#include "gitaudit/identity.hpp"

namespace gitaudit {

struct AuditFilters {
  std::optional<std::string> domain;      // "@example.org" or "example.org"
  std::optional<std::string> repository;  // full_name the person contributed to
  bool compromised_only = false;
};

bool passes(const Person& p, const AuditFilters& filters);

struct ExposureEntry {
  PersonId id = 0;
  std::set<std::string> names;
  std::set<std::string> exposed_emails;
  std::set<std::string> usernames;
  bool compromised = false;
  std::map<std::string, std::int64_t> repositories;
  std::size_t recommendation_count = 0;
  bool possibly_overmerged = false;  // more than 10 distinct emails
};

struct ExposureReport {
  std::vector<ExposureEntry> entries;
  std::optional<DbStats> summary;  // absent for an empty database
};

struct AuditOptions {
  const CoherenceGraph* graph = nullptr;  // enables recommendation counts
  std::size_t recommend_k = 5;
  PipelineStats pipeline;
};

ExposureReport audit(const PersonDatabase& db, const AuditFilters& filters,
                     const AuditOptions& opts = {});

std::string report_to_text(const ExposureReport& report);
/// One JSON object per entry, then one {"summary": ...} line.
std::string report_to_ndjson(const ExposureReport& report);

}  // namespace gitaudit
