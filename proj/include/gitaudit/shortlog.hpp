#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gitaudit {

/// One author summary row exactly as the tool printed it. No normalization.
struct ShortlogLine {
  std::int64_t commits = 0;
  std::string name;
  std::string email;

  bool operator==(const ShortlogLine&) const = default;
  auto operator<=>(const ShortlogLine&) const = default;
};

struct ParseWarning {
  std::size_t line_no;  // 1-based
  std::string text;
};

struct ShortlogParse {
  std::vector<ShortlogLine> lines;
  std::vector<ParseWarning> warnings;
};

/// `git shortlog -sne HEAD` in repo_path. Empty repositories yield "".
/// Throws NotARepository or ToolFailure.
std::string collect_shortlog(const std::filesystem::path& repo_path);

/// Total over arbitrary bytes: rows shaped `<spaces><count>\t<name> <<email>>`
/// become lines (last angle-bracket pair is the email), anything else that is
/// not blank becomes a warning.
ShortlogParse parse_shortlog(std::string_view text);

/// Lossy UTF-8 view for display: invalid sequences become U+FFFD.
std::string to_display_utf8(std::string_view raw);
bool is_valid_utf8(std::string_view s);

}  // namespace gitaudit
