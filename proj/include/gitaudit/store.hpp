#pragma once

#include <filesystem>
#include <string>

#include "gitaudit/identity.hpp"
#include "gitaudit/pipeline.hpp"

namespace gitaudit {

// Person database as newline-delimited JSON: one person per line, ordered by
// id, every set sorted. Equal databases serialize to identical bytes.
// Strings that are not valid UTF-8 are written as {"hex": "..."}.

std::string serialize_database(const PersonDatabase& db);
/// Throws CorruptRecord (1-based line) or CanonicalityViolation.
PersonDatabase parse_database(const std::string& text);

void save_database(const PersonDatabase& db, const std::filesystem::path& path);
/// Throws IoError, CorruptRecord or CanonicalityViolation.
PersonDatabase load_database(const std::filesystem::path& path);

/// Content comparison: same persons (by id) with the same data.
bool same_database(const PersonDatabase& a, const PersonDatabase& b);

void save_pipeline_stats(const PipelineStats& stats, const std::filesystem::path& path);
PipelineStats load_pipeline_stats(const std::filesystem::path& path);

}  // namespace gitaudit
