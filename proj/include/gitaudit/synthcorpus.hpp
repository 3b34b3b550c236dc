#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gitaudit/catalog.hpp"
#include "gitaudit/identity.hpp"

namespace gitaudit {

/// A run of commits one synthetic person made in one repository under one
/// (alias, email) identity. email == nullopt commits with an empty address.
struct SynthCommits {
  std::size_t repo = 0;
  std::size_t alias = 0;
  std::optional<std::size_t> email;
  std::int64_t commits = 1;
  bool operator==(const SynthCommits&) const = default;
};

struct SynthPerson {
  std::vector<std::string> names;   // 1-3 aliases
  std::vector<std::string> emails;  // 0-3, regular or noreply
  std::vector<SynthCommits> commits;
  bool operator==(const SynthPerson&) const = default;
};

struct CorpusSpec {
  std::uint64_t seed = 0;
  std::vector<std::string> repos;  // full_names; repo_count == repos.size()
  std::vector<SynthPerson> persons;

  std::size_t repo_count() const { return repos.size(); }
  /// The shortlog lines each repository will produce, repo by repo, each
  /// repo's lines sorted by (name, email). Identical identities within one
  /// repository are combined, as the summary tool does.
  std::vector<RepoLine> emitted_lines() const;
  std::vector<ShortlogLine> lines_for_repo(std::size_t repo) const;
  std::int64_t commits_in_repo(std::size_t repo) const;
  /// Ground-truth identity groups over emitted_lines() indexes.
  std::vector<std::vector<std::size_t>> expected_partition() const;

  bool operator==(const CorpusSpec&) const = default;
};

struct SynthParams {
  std::size_t repo_count = 6;
  std::size_t person_count = 20;
  double noreply_probability = 0.3;
  double shared_alias_probability = 0.05;   // alias taken from another person
  double username_as_alias_probability = 0.3;  // noreply username reused as a name
  std::int64_t max_commits_per_identity = 4;
  std::size_t max_repos_per_person = 3;
};

/// Deterministic in `seed` and `params`.
CorpusSpec random_corpus_spec(std::uint64_t seed, const SynthParams& params = {});

/// The two-person scenario where each person commits once with a real
/// address and once with a noreply address, split over two repositories.
CorpusSpec bridge_scenario_spec();

std::string corpus_spec_to_json(const CorpusSpec& spec);
/// Throws FixtureError on malformed input.
CorpusSpec corpus_spec_from_json(const std::string& text);

/// Creates one local repository per spec repo under out_dir (named by
/// RepoRecord::dir_name) whose history realizes the spec exactly. Returns the
/// repository paths in spec order. Throws IoError or ToolFailure.
std::vector<std::filesystem::path> generate_corpus(const CorpusSpec& spec,
                                                   const std::filesystem::path& out_dir);

/// Catalog entries pointing at generated repositories, with seeded stars and sizes.
std::vector<RepoRecord> corpus_catalog(const CorpusSpec& spec,
                                       const std::vector<std::filesystem::path>& repo_paths);

}  // namespace gitaudit
