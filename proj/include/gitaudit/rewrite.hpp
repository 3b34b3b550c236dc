#pragma once

#include <string>

namespace gitaudit {

/// A POSIX shell script that, run inside a repository, rewrites every
/// commit's author and committer identity using `old_email` to
/// (correct_name, correct_email) across all branches and tags.
/// An empty correct_name keeps the original names. Commits that do not use
/// old_email keep their hashes unless an ancestor was rewritten.
/// Throws std::invalid_argument for an empty old_email.
std::string emit_rewrite_script(const std::string& old_email, const std::string& correct_name,
                                const std::string& correct_email);

/// Single-quotes `s` for a POSIX shell.
std::string shell_quote(const std::string& s);

}  // namespace gitaudit
