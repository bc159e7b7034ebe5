#pragma once

#include <optional>
#include <string_view>

namespace triage {

/// Human or model decision on a report. NonIssue is the positive class.
enum class Verdict { Issue, NonIssue };

inline std::string_view to_string(Verdict v) { return v == Verdict::NonIssue ? "NonIssue" : "Issue"; }

inline std::optional<Verdict> parse_verdict(std::string_view s) {
  if (s == "NonIssue") return Verdict::NonIssue;
  if (s == "Issue") return Verdict::Issue;
  return std::nullopt;
}

/// +1 for NonIssue, -1 for Issue.
inline int sign_of(Verdict v) { return v == Verdict::NonIssue ? 1 : -1; }

}  // namespace triage
