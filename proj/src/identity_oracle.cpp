// Quadratic reference for the identity-matching relation. Deliberately uses
// no hash indexes: every pair of lines is compared until labels stop moving.

#include <algorithm>
#include <map>

#include "gitaudit/identity.hpp"

namespace gitaudit {

namespace {

struct LineKeys {
  std::string name;      // normalized, may be empty
  std::string email;     // normalized regular address, may be empty
  std::string username;  // normalized noreply username, may be empty
};

LineKeys keys_of(const ShortlogLine& line) {
  LineKeys k;
  k.name = normalize_name(line.name);
  const auto cls = classify_email(line.email);
  if (const auto* nr = std::get_if<NoreplyEmail>(&cls))
    k.username = normalize_username(nr->username);
  else
    k.email = normalize_email(line.email);
  return k;
}

bool shares(const std::string& a, const std::string& b) { return !a.empty() && a == b; }

bool matches(const LineKeys& a, const LineKeys& b) {
  return shares(a.name, b.name) || shares(a.email, b.email) || shares(a.username, b.username) ||
         shares(a.name, b.username) || shares(a.username, b.name);
}

}  // namespace

std::vector<std::vector<std::size_t>> brute_force_resolve(std::span<const RepoLine> lines) {
  const std::size_t n = lines.size();
  std::vector<LineKeys> keys;
  keys.reserve(n);
  for (const auto& rl : lines) keys.push_back(keys_of(rl.line));

  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = i;

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (label[i] == label[j] || !matches(keys[i], keys[j])) continue;
        const auto m = std::min(label[i], label[j]);
        label[i] = label[j] = m;
        changed = true;
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[label[i]].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(groups.size());
  for (auto& [l, g] : groups) out.push_back(std::move(g));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gitaudit
