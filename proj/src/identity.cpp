#include "gitaudit/identity.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "gitaudit/errors.hpp"

namespace gitaudit {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(),
                    [](char x, char y) { return ascii_lower(x) == ascii_lower(y); });
}

}  // namespace

EmailClass classify_email(std::string_view email) {
  const auto trimmed = trim(email);
  const auto at = trimmed.rfind('@');
  if (at == std::string_view::npos || !iequals(trimmed.substr(at + 1), kNoreplyDomain))
    return RegularEmail{std::string(email)};

  std::string_view local = trimmed.substr(0, at);
  NoreplyEmail out;
  if (auto plus = local.find('+'); plus != std::string_view::npos) {
    std::uint64_t id = 0;
    auto prefix = local.substr(0, plus);
    auto [ptr, ec] = std::from_chars(prefix.data(), prefix.data() + prefix.size(), id);
    if (!prefix.empty() && ec == std::errc{} && ptr == prefix.data() + prefix.size()) {
      out.numeric_id = id;
      local = local.substr(plus + 1);
    }
  }
  if (local.empty()) return RegularEmail{std::string(email)};
  out.username = std::string(local);
  return out;
}

std::string normalize_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  bool pending_space = false;
  for (char c : trim(name)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

std::string normalize_email(std::string_view email) { return lower(trim(email)); }
std::string normalize_username(std::string_view username) { return lower(trim(username)); }

std::int64_t Person::total_commits() const {
  std::int64_t t = 0;
  for (const auto& [repo, n] : contributions) t += n;
  return t;
}

bool Person::same_content(const Person& o) const {
  return names == o.names && emails == o.emails && usernames == o.usernames &&
         contributions == o.contributions && lines == o.lines;
}

bool is_compromised(const Person& p) { return !p.usernames.empty() && !p.emails.empty(); }

PersonId outcome_person(const MergeOutcome& outcome) {
  return std::visit(
      [](const auto& o) -> PersonId {
        if constexpr (std::is_same_v<std::decay_t<decltype(o)>, Unified>)
          return o.surviving_id;
        else
          return o.id;
      },
      outcome);
}

// ---------------------------------------------------------------------------

PersonId PersonDatabase::root(PersonId id) const {
  while (parent_[id] != id) id = parent_[id];
  return id;
}

PersonId PersonDatabase::root_compress(PersonId id) {
  PersonId r = root(id);
  while (parent_[id] != r) {
    PersonId next = parent_[id];
    parent_[id] = r;
    id = next;
  }
  return r;
}

PersonId PersonDatabase::create_person() {
  const PersonId id = parent_.size();
  parent_.push_back(id);
  Person p;
  p.id = id;
  slots_.emplace_back(std::move(p));
  ++live_count_;
  return id;
}

void PersonDatabase::merge_into(Person& survivor, Person& absorbed) {
  auto merge_set = [](std::set<std::string>& into, std::set<std::string>& from) {
    if (from.size() > into.size()) into.swap(from);
    into.merge(from);
  };
  merge_set(survivor.names, absorbed.names);
  merge_set(survivor.emails, absorbed.emails);
  merge_set(survivor.usernames, absorbed.usernames);
  if (absorbed.contributions.size() > survivor.contributions.size())
    survivor.contributions.swap(absorbed.contributions);
  for (const auto& [repo, n] : absorbed.contributions) survivor.contributions[repo] += n;
  survivor.lines += absorbed.lines;
  parent_[absorbed.id] = survivor.id;
  slots_[absorbed.id].reset();
  --live_count_;
}

MergeOutcome PersonDatabase::ingest_line(std::string_view repo, const ShortlogLine& line) {
  if (line.commits < 1) throw std::invalid_argument("shortlog line with commits < 1");

  const std::string name_key = normalize_name(line.name);
  const EmailClass cls = classify_email(line.email);
  std::string email_key;
  std::string username_key;
  std::string username_raw;
  if (const auto* reg = std::get_if<RegularEmail>(&cls)) {
    email_key = normalize_email(reg->address);
  } else {
    const auto& nr = std::get<NoreplyEmail>(cls);
    username_raw = nr.username;
    username_key = normalize_username(nr.username);
  }

  std::vector<PersonId> matched;
  auto probe = [&](const std::unordered_map<std::string, PersonId>& index, const std::string& key) {
    if (key.empty()) return;
    if (auto it = index.find(key); it != index.end()) matched.push_back(root_compress(it->second));
  };
  probe(name_index_, name_key);
  probe(username_index_, name_key);
  probe(email_index_, email_key);
  probe(username_index_, username_key);
  probe(name_index_, username_key);
  std::sort(matched.begin(), matched.end());
  matched.erase(std::unique(matched.begin(), matched.end()), matched.end());

  MergeOutcome outcome;
  PersonId target;
  if (matched.empty()) {
    target = create_person();
    outcome = Created{target};
    if (name_key.empty() && email_key.empty() && username_key.empty())
      warnings_.push_back("line without name or email in " + std::string(repo) +
                          " kept as person " + std::to_string(target));
  } else if (matched.size() == 1) {
    target = matched.front();
    outcome = Absorbed{target};
  } else {
    target = matched.front();
    Unified u{target, {}};
    for (std::size_t i = 1; i < matched.size(); ++i) {
      merge_into(*slots_[target], *slots_[matched[i]]);
      u.absorbed_ids.push_back(matched[i]);
    }
    outcome = std::move(u);
  }

  Person& p = *slots_[target];
  if (!name_key.empty()) {
    p.names.insert(line.name);
    name_index_.try_emplace(name_key, target);
  }
  if (!email_key.empty()) {
    p.emails.insert(line.email);
    email_index_.try_emplace(email_key, target);
  }
  if (!username_key.empty()) {
    p.usernames.insert(username_raw);
    username_index_.try_emplace(username_key, target);
  }
  p.contributions[std::string(repo)] += line.commits;
  ++p.lines;
  return outcome;
}

RepoIngestSummary PersonDatabase::ingest_repository(std::string_view repo,
                                                    std::span<const ShortlogLine> lines) {
  RepoIngestSummary s;
  for (const auto& line : lines) {
    if (std::holds_alternative<Created>(ingest_line(repo, line)))
      ++s.new_persons;
    else
      ++s.updated_persons;
  }
  return s;
}

std::vector<const Person*> PersonDatabase::persons() const {
  std::vector<const Person*> out;
  out.reserve(live_count_);
  for (const auto& slot : slots_)
    if (slot) out.push_back(&*slot);
  return out;
}

const Person* PersonDatabase::find(PersonId id) const {
  if (id == 0 || id >= slots_.size()) return nullptr;
  const auto& slot = slots_[root(id)];
  return slot ? &*slot : nullptr;
}

std::optional<PersonId> PersonDatabase::lookup_name(std::string_view raw_name) const {
  auto key = normalize_name(raw_name);
  if (auto it = name_index_.find(key); it != name_index_.end()) return root(it->second);
  return std::nullopt;
}

std::optional<PersonId> PersonDatabase::lookup_email(std::string_view raw_email) const {
  auto key = normalize_email(raw_email);
  if (auto it = email_index_.find(key); it != email_index_.end()) return root(it->second);
  return std::nullopt;
}

std::optional<PersonId> PersonDatabase::lookup_username(std::string_view raw_username) const {
  auto key = normalize_username(raw_username);
  if (auto it = username_index_.find(key); it != username_index_.end()) return root(it->second);
  return std::nullopt;
}

std::optional<PersonId> PersonDatabase::lookup_line(std::string_view raw_name,
                                                    std::string_view raw_email) const {
  const auto cls = classify_email(raw_email);
  if (const auto* nr = std::get_if<NoreplyEmail>(&cls)) {
    if (auto id = lookup_username(nr->username)) return id;
  } else if (!normalize_email(raw_email).empty()) {
    if (auto id = lookup_email(raw_email)) return id;
  }
  if (!normalize_name(raw_name).empty()) {
    if (auto id = lookup_name(raw_name)) return id;
  }
  return std::nullopt;
}

std::int64_t PersonDatabase::lines_ingested() const {
  std::int64_t n = 0;
  for (const auto& slot : slots_)
    if (slot) n += slot->lines;
  return n;
}

void PersonDatabase::check_canonical() const {
  auto fail = [](const std::string& what) { throw CanonicalityViolation(what); };

  auto holds_name = [](const Person& p, const std::string& key) {
    return std::any_of(p.names.begin(), p.names.end(),
                       [&](const std::string& n) { return normalize_name(n) == key; });
  };
  auto holds_email = [](const Person& p, const std::string& key) {
    return std::any_of(p.emails.begin(), p.emails.end(),
                       [&](const std::string& e) { return normalize_email(e) == key; });
  };
  auto holds_username = [](const Person& p, const std::string& key) {
    return std::any_of(p.usernames.begin(), p.usernames.end(),
                       [&](const std::string& u) { return normalize_username(u) == key; });
  };

  auto check_index = [&](const auto& index, const char* kind, auto holds) {
    for (const auto& [key, id] : index) {
      const Person* p = find(id);
      if (!p) fail(std::string(kind) + " key '" + key + "' points at a dead person");
      if (!holds(*p, key))
        fail(std::string(kind) + " key '" + key + "' points at person " + std::to_string(p->id) +
             " which does not hold it");
    }
  };
  check_index(name_index_, "name", holds_name);
  check_index(email_index_, "email", holds_email);
  check_index(username_index_, "username", holds_username);

  std::size_t live = 0;
  for (const auto& slot : slots_) {
    if (!slot) continue;
    ++live;
    const Person& p = *slot;
    if (root(p.id) != p.id) fail("person " + std::to_string(p.id) + " is not a root");
    auto expect = [&](const auto& index, const std::string& key, const char* kind) {
      if (key.empty()) return;
      auto it = index.find(key);
      if (it == index.end() || root(it->second) != p.id)
        fail(std::string(kind) + " '" + key + "' of person " + std::to_string(p.id) +
             " resolves elsewhere");
    };
    for (const auto& n : p.names) {
      expect(name_index_, normalize_name(n), "name");
      // a name equal to someone's username must be that someone
      if (auto it = username_index_.find(normalize_name(n));
          it != username_index_.end() && root(it->second) != p.id)
        fail("name '" + n + "' of person " + std::to_string(p.id) + " is another person's username");
    }
    for (const auto& e : p.emails) expect(email_index_, normalize_email(e), "email");
    for (const auto& u : p.usernames) expect(username_index_, normalize_username(u), "username");
    for (const auto& [repo, n] : p.contributions)
      if (n < 1) fail("person " + std::to_string(p.id) + " has non-positive count for " + repo);
  }
  if (live != live_count_) fail("live person count out of sync");
}

PersonDatabase PersonDatabase::from_persons(std::vector<Person> persons) {
  std::sort(persons.begin(), persons.end(),
            [](const Person& a, const Person& b) { return a.id < b.id; });
  PersonDatabase db;
  for (std::size_t i = 0; i < persons.size(); ++i) {
    if (persons[i].id == 0) throw CanonicalityViolation("person id 0 is reserved");
    if (i > 0 && persons[i].id == persons[i - 1].id)
      throw CanonicalityViolation("duplicate person id " + std::to_string(persons[i].id));
  }
  const PersonId max_id = persons.empty() ? 0 : persons.back().id;
  db.parent_.resize(max_id + 1);
  for (PersonId id = 0; id <= max_id; ++id) db.parent_[id] = id;
  db.slots_.resize(max_id + 1);

  auto claim = [](auto& index, const std::string& key, PersonId id, const char* kind) {
    if (key.empty()) return;
    auto [it, inserted] = index.try_emplace(key, id);
    if (!inserted && it->second != id)
      throw CanonicalityViolation(std::string(kind) + " '" + key + "' held by persons " +
                                  std::to_string(it->second) + " and " + std::to_string(id));
  };
  for (auto& p : persons) {
    if (p.names.empty() && p.emails.empty() && p.usernames.empty() && p.lines == 0)
      throw CanonicalityViolation("person " + std::to_string(p.id) + " has no identity data");
    for (const auto& n : p.names) claim(db.name_index_, normalize_name(n), p.id, "name");
    for (const auto& e : p.emails) claim(db.email_index_, normalize_email(e), p.id, "email");
    for (const auto& u : p.usernames)
      claim(db.username_index_, normalize_username(u), p.id, "username");
    const PersonId id = p.id;
    db.slots_[id] = std::move(p);
    ++db.live_count_;
  }
  db.check_canonical();
  return db;
}

std::vector<PersonId> overmerged_persons(const PersonDatabase& db, std::size_t threshold) {
  std::vector<PersonId> out;
  for (const Person* p : db.persons())
    if (p->emails.size() > threshold) out.push_back(p->id);
  return out;
}

std::vector<std::vector<std::size_t>> database_partition(const PersonDatabase& db,
                                                         std::span<const RepoLine> lines) {
  std::map<PersonId, std::vector<std::size_t>> groups;
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (auto id = db.lookup_line(lines[i].line.name, lines[i].line.email))
      groups[*id].push_back(i);
    else
      out.push_back({i});
  }
  for (auto& [id, g] : groups) out.push_back(std::move(g));
  for (auto& g : out) std::sort(g.begin(), g.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gitaudit
