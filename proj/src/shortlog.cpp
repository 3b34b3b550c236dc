#include "gitaudit/shortlog.hpp"

#include <charconv>

#include "gitaudit/errors.hpp"
#include "gitaudit/process.hpp"

namespace gitaudit {

std::string collect_shortlog(const std::filesystem::path& repo_path) {
  if (!std::filesystem::is_directory(repo_path))
    throw NotARepository("not a directory: " + repo_path.string());

  ProcessOptions opts;
  opts.cwd = repo_path;
  auto probe = run_process({"git", "rev-parse", "--git-dir"}, opts);
  if (probe.exit_code != 0) throw NotARepository(repo_path.string() + ": " + probe.err);

  auto head = run_process({"git", "rev-parse", "--verify", "--quiet", "HEAD^{commit}"}, opts);
  if (head.exit_code != 0) return {};

  auto res = run_process({"git", "shortlog", "-s", "-n", "-e", "HEAD"}, opts);
  if (!res.ok())
    throw ToolFailure("git shortlog failed in " + repo_path.string() + " (exit " +
                          std::to_string(res.exit_code) + ")",
                      res.err);
  return res.out;
}

namespace {

bool parse_row(std::string_view row, ShortlogLine& out) {
  std::size_t i = 0;
  while (i < row.size() && row[i] == ' ') ++i;
  const std::size_t digits = i;
  while (i < row.size() && row[i] >= '0' && row[i] <= '9') ++i;
  if (i == digits || i >= row.size() || row[i] != '\t') return false;

  std::int64_t count = 0;
  auto [ptr, ec] = std::from_chars(row.data() + digits, row.data() + i, count);
  if (ec != std::errc{} || ptr != row.data() + i || count < 1) return false;

  std::string_view rest = row.substr(i + 1);
  if (rest.empty() || rest.back() != '>') return false;
  const auto open = rest.rfind('<');
  if (open == std::string_view::npos) return false;
  std::string_view email = rest.substr(open + 1, rest.size() - open - 2);
  if (email.find('>') != std::string_view::npos) return false;

  std::string_view name = rest.substr(0, open);
  if (name.empty()) {
    // shortlog always separates name and email by one space, even for an empty name
    return false;
  }
  if (name.back() != ' ') return false;
  name.remove_suffix(1);

  out.commits = count;
  out.name.assign(name);
  out.email.assign(email);
  return true;
}

}  // namespace

ShortlogParse parse_shortlog(std::string_view text) {
  ShortlogParse result;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view row = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (row.find_first_not_of(" \t") == std::string_view::npos) continue;
    ShortlogLine line;
    if (parse_row(row, line))
      result.lines.push_back(std::move(line));
    else
      result.warnings.push_back({line_no, std::string(row)});
  }
  return result;
}

namespace {

// Length of the valid UTF-8 sequence starting at s[i], or 0.
std::size_t utf8_seq_len(std::string_view s, std::size_t i) {
  auto c = static_cast<unsigned char>(s[i]);
  std::size_t len;
  char32_t cp;
  if (c < 0x80) return 1;
  if ((c & 0xE0) == 0xC0) {
    len = 2;
    cp = c & 0x1F;
  } else if ((c & 0xF0) == 0xE0) {
    len = 3;
    cp = c & 0x0F;
  } else if ((c & 0xF8) == 0xF0) {
    len = 4;
    cp = c & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    auto cc = static_cast<unsigned char>(s[i + k]);
    if ((cc & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (cc & 0x3F);
  }
  // overlong forms, surrogates, out of range
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
      (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)
    return 0;
  return len;
}

}  // namespace

bool is_valid_utf8(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    auto len = utf8_seq_len(s, i);
    if (len == 0) return false;
    i += len;
  }
  return true;
}

std::string to_display_utf8(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size();) {
    auto len = utf8_seq_len(raw, i);
    if (len == 0) {
      out += "\xEF\xBF\xBD";
      ++i;
    } else {
      out.append(raw.substr(i, len));
      i += len;
    }
  }
  return out;
}

}  // namespace gitaudit
