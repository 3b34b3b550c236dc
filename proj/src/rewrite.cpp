#include "gitaudit/rewrite.hpp"

#include <stdexcept>

namespace gitaudit {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

std::string emit_rewrite_script(const std::string& old_email, const std::string& correct_name,
                                const std::string& correct_email) {
  if (old_email.empty()) throw std::invalid_argument("old_email must not be empty");

  std::string s;
  s += "#!/bin/sh\n";
  s += "# Replace an exposed commit email in every branch and tag of the current repository.\n";
  s += "# Review the result, then force-push: git push --force --tags origin 'refs/heads/*'\n";
  s += "set -e\n\n";
  s += "OLD_EMAIL=" + shell_quote(old_email) + "\n";
  s += "CORRECT_NAME=" + shell_quote(correct_name) + "\n";
  s += "CORRECT_EMAIL=" + shell_quote(correct_email) + "\n";
  s += "export OLD_EMAIL CORRECT_NAME CORRECT_EMAIL\n\n";
  s += "FILTER_BRANCH_SQUELCH_WARNING=1 git filter-branch -f --env-filter '\n";
  s += "if [ \"$GIT_COMMITTER_EMAIL\" = \"$OLD_EMAIL\" ]; then\n";
  s += "    if [ -n \"$CORRECT_NAME\" ]; then export GIT_COMMITTER_NAME=\"$CORRECT_NAME\"; fi\n";
  s += "    export GIT_COMMITTER_EMAIL=\"$CORRECT_EMAIL\"\n";
  s += "fi\n";
  s += "if [ \"$GIT_AUTHOR_EMAIL\" = \"$OLD_EMAIL\" ]; then\n";
  s += "    if [ -n \"$CORRECT_NAME\" ]; then export GIT_AUTHOR_NAME=\"$CORRECT_NAME\"; fi\n";
  s += "    export GIT_AUTHOR_EMAIL=\"$CORRECT_EMAIL\"\n";
  s += "fi\n";
  s += "' --tag-name-filter cat -- --branches --tags\n";
  return s;
}

}  // namespace gitaudit
