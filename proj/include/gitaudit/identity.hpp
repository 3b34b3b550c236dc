#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "gitaudit/shortlog.hpp"

namespace gitaudit {

using PersonId = std::uint64_t;

inline constexpr std::string_view kNoreplyDomain = "users.noreply.github.com";

struct RegularEmail {
  std::string address;
  bool operator==(const RegularEmail&) const = default;
};

struct NoreplyEmail {
  std::optional<std::uint64_t> numeric_id;
  std::string username;  // as written in the address
  bool operator==(const NoreplyEmail&) const = default;
};

using EmailClass = std::variant<RegularEmail, NoreplyEmail>;

/// `[id+]username@users.noreply.github.com` is Noreply (domain compared
/// case-insensitively); anything else, including a noreply address with an
/// empty username, is Regular.
EmailClass classify_email(std::string_view email);

// Match-key normalization. Names: trimmed, internal whitespace runs collapsed
// to one space, case kept. Emails and usernames: trimmed and ASCII-lowercased.
std::string normalize_name(std::string_view name);
std::string normalize_email(std::string_view email);
std::string normalize_username(std::string_view username);

struct Person {
  PersonId id = 0;
  std::set<std::string> names;
  std::set<std::string> emails;     // regular addresses only
  std::set<std::string> usernames;  // extracted from noreply addresses
  std::map<std::string, std::int64_t> contributions;  // full_name -> commits
  std::int64_t lines = 0;                             // shortlog lines folded in

  std::int64_t total_commits() const;
  bool same_content(const Person& other) const;  // everything but id
  bool operator==(const Person&) const = default;
};

/// True iff the person used a noreply address and a real address was linked anyway.
bool is_compromised(const Person& p);

struct Created {
  PersonId id;
  bool operator==(const Created&) const = default;
};
struct Absorbed {
  PersonId id;
  bool operator==(const Absorbed&) const = default;
};
struct Unified {
  PersonId surviving_id;
  std::vector<PersonId> absorbed_ids;
  bool operator==(const Unified&) const = default;
};
using MergeOutcome = std::variant<Created, Absorbed, Unified>;

PersonId outcome_person(const MergeOutcome& outcome);

struct RepoIngestSummary {
  std::size_t new_persons = 0;
  std::size_t updated_persons = 0;
};

/// Persons plus hash indexes from normalized name / email / username to the
/// owning person. A line matches a person when any of its keys is found;
/// a line's name is also checked against usernames and a line's noreply
/// username against names. Merged persons keep the lowest id.
class PersonDatabase {
 public:
  MergeOutcome ingest_line(std::string_view repo, const ShortlogLine& line);
  RepoIngestSummary ingest_repository(std::string_view repo, std::span<const ShortlogLine> lines);

  std::size_t size() const noexcept { return live_count_; }
  bool empty() const noexcept { return live_count_ == 0; }

  /// Live persons in ascending id order.
  std::vector<const Person*> persons() const;
  const Person* find(PersonId id) const;

  std::optional<PersonId> lookup_name(std::string_view raw_name) const;
  std::optional<PersonId> lookup_email(std::string_view raw_email) const;
  std::optional<PersonId> lookup_username(std::string_view raw_username) const;
  /// The person a line with this (name, email) would match, if any.
  std::optional<PersonId> lookup_line(std::string_view raw_name, std::string_view raw_email) const;

  /// Throws CanonicalityViolation if an index entry is stale or two persons share a key.
  void check_canonical() const;

  /// Builds a database from stored persons, re-creating every index.
  /// Throws CanonicalityViolation when two persons share a key or an id repeats.
  static PersonDatabase from_persons(std::vector<Person> persons);

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  std::int64_t lines_ingested() const;

 private:
  PersonId root(PersonId id) const;
  PersonId root_compress(PersonId id);
  PersonId create_person();
  void merge_into(Person& survivor, Person& absorbed);
  void index_person_keys(const Person& p);

  std::vector<PersonId> parent_{0};  // slot 0 unused; ids start at 1
  std::vector<std::optional<Person>> slots_{std::nullopt};
  std::size_t live_count_ = 0;
  std::unordered_map<std::string, PersonId> name_index_;
  std::unordered_map<std::string, PersonId> email_index_;
  std::unordered_map<std::string, PersonId> username_index_;
  std::vector<std::string> warnings_;
};

/// Persons holding more than `threshold` distinct emails: likely merges of
/// distinct people sharing a common name.
std::vector<PersonId> overmerged_persons(const PersonDatabase& db, std::size_t threshold = 10);

struct RepoLine {
  std::string repo;
  ShortlogLine line;
};

/// Reference resolver: connected components of the pairwise match relation,
/// found by repeated quadratic scans. Groups hold line indexes, each group
/// sorted, groups sorted by first element.
std::vector<std::vector<std::size_t>> brute_force_resolve(std::span<const RepoLine> lines);

/// The partition a database induces on `lines` (same canonical ordering as
/// brute_force_resolve). Lines without any key form singleton groups.
std::vector<std::vector<std::size_t>> database_partition(const PersonDatabase& db,
                                                         std::span<const RepoLine> lines);

}  // namespace gitaudit
