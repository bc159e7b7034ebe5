#pragma once

// Issue reports, their labels, the on-disk label store, the Table-1 style
// distribution report and the synthetic corpus generator.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"

#include "triage/error.hpp"
#include "triage/morphology.hpp"
#include "triage/patterns.hpp"
#include "triage/verdict.hpp"

namespace triage::corpus {

/// Seconds since 1970-01-01T00:00:00Z.
using Timestamp = std::int64_t;

namespace detail {

// civil-from-days and days-from-civil for the proleptic Gregorian calendar
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

}  // namespace detail

inline std::string format_timestamp(Timestamp t) {
  std::int64_t days = t / 86400, secs = t % 86400;
  if (secs < 0) {
    secs += 86400;
    --days;
  }
  std::int64_t y;
  unsigned m, d;
  detail::civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02dZ", static_cast<long long>(y), m, d,
                static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60), static_cast<int>(secs % 60));
  return buf;
}

/// Accepts exactly YYYY-MM-DDTHH:MM:SSZ.
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
  if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':' || s[19] != 'Z')
    return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len) -> int {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (s[i] < '0' || s[i] > '9') return -1;
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  const int y = num(0, 4), mo = num(5, 2), d = num(8, 2), h = num(11, 2), mi = num(14, 2), se = num(17, 2);
  if (y < 0 || mo < 1 || mo > 12 || d < 1 || h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 || se > 59)
    return std::nullopt;
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  const unsigned limit = kDays[mo - 1] + (mo == 2 && leap ? 1 : 0);
  if (static_cast<unsigned>(d) > limit) return std::nullopt;
  return detail::days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 + h * 3600 +
         mi * 60 + se;
}

inline Timestamp now() {
  using namespace std::chrono;
  return duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
}

struct IssueReport {
  std::string id;
  std::string project;
  std::string summary;
  std::string description;
  Timestamp created_at = 0;

  /// The text the extractors see.
  std::string text() const { return summary + "\n" + description; }

  friend bool operator==(const IssueReport&, const IssueReport&) = default;
};

struct LabelRecord {
  std::string report_id;
  Verdict verdict = Verdict::Issue;
  std::optional<std::string> pattern_code;
  std::string labeler;
  Timestamp labeled_at = 0;

  friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

/// Report with its ground-truth label, as produced by the generator.
struct LabeledReport {
  IssueReport report;
  LabelRecord label;

  friend bool operator==(const LabeledReport&, const LabeledReport&) = default;
};

inline constexpr const char* kReportsFormat = "triage-reports";
inline constexpr const char* kLabelsFormat = "triage-labels";
inline constexpr int kFormatVersion = 1;

// ---------------------------------------------------------------------------
// Record encoding

inline nlohmann::ordered_json header_json(const char* format) {
  return {{"format", format}, {"version", kFormatVersion}};
}

inline nlohmann::ordered_json to_json(const IssueReport& r) {
  return {{"id", r.id},
          {"project", r.project},
          {"summary", r.summary},
          {"description", r.description},
          {"created_at", format_timestamp(r.created_at)}};
}

inline nlohmann::ordered_json to_json(const LabelRecord& l) {
  nlohmann::ordered_json j{{"report_id", l.report_id}, {"verdict", std::string(to_string(l.verdict))}};
  if (l.pattern_code) j["pattern_code"] = *l.pattern_code;
  j["labeler"] = l.labeler;
  j["labeled_at"] = format_timestamp(l.labeled_at);
  return j;
}

namespace detail {

inline std::string string_field(const nlohmann::json& j, const char* key, bool required = true) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (required) throw ValidationError(std::string("missing field '") + key + "'");
    return {};
  }
  if (!it->is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

inline Timestamp time_field(const nlohmann::json& j, const char* key) {
  const auto s = string_field(j, key);
  auto t = parse_timestamp(s);
  if (!t) throw ValidationError(std::string("field '") + key + "' is not a UTC timestamp YYYY-MM-DDTHH:MM:SSZ");
  return *t;
}

}  // namespace detail

inline IssueReport report_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("report must be an object");
  IssueReport r;
  r.id = detail::string_field(j, "id");
  r.project = detail::string_field(j, "project");
  r.summary = detail::string_field(j, "summary");
  r.description = detail::string_field(j, "description", false);
  r.created_at = detail::time_field(j, "created_at");
  if (r.id.empty()) throw ValidationError("empty report id");
  if (r.summary.empty()) throw ValidationError("empty summary");
  if (r.summary.find('\n') != std::string::npos) throw ValidationError("summary must be a single line");
  return r;
}

/// Checks the pattern_code-iff-NonIssue rule, plus catalog membership when
/// a catalog is given.
inline void check_label(const LabelRecord& l, const patterns::Catalog* catalog = nullptr) {
  if (l.verdict == Verdict::NonIssue && !l.pattern_code)
    throw ConflictError("a NonIssue label needs a pattern_code");
  if (l.verdict == Verdict::Issue && l.pattern_code) throw ConflictError("an Issue label must not carry a pattern_code");
  if (catalog && l.pattern_code && !catalog->contains(*l.pattern_code))
    throw ConflictError("pattern_code '" + *l.pattern_code + "' is not in the active catalog");
}

/// Decodes a label; `labeled_at` may be omitted when `default_time` is set.
inline LabelRecord label_from_json(const nlohmann::json& j, std::optional<Timestamp> default_time = std::nullopt) {
  if (!j.is_object()) throw ValidationError("label must be an object");
  LabelRecord l;
  l.report_id = detail::string_field(j, "report_id");
  const auto v = parse_verdict(detail::string_field(j, "verdict"));
  if (!v) throw ValidationError("verdict must be Issue or NonIssue");
  l.verdict = *v;
  if (auto it = j.find("pattern_code"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError("field 'pattern_code' must be a string");
    l.pattern_code = it->get<std::string>();
  }
  l.labeler = detail::string_field(j, "labeler", false);
  if (j.contains("labeled_at") || !default_time) l.labeled_at = detail::time_field(j, "labeled_at");
  else l.labeled_at = *default_time;
  return l;
}

namespace detail {

/// Calls `each(json, line_number)` for every record after the header line.
template <typename Each>
void read_records(std::string_view content, const std::string& source, const char* format, Each each) {
  const auto lines = morph::Lexicon::split_lines(content);
  std::size_t ln = 0;
  bool header = false;
  for (const auto& line : lines) {
    ++ln;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw LoadError(source, ln, "malformed JSON");
    if (!header) {
      if (!j.is_object() || j.value("format", "") != format || j.value("version", 0) != kFormatVersion)
        throw LoadError(source, ln, std::string("expected header {\"format\":\"") + format +
                                        "\",\"version\":" + std::to_string(kFormatVersion) + "}");
      header = true;
      continue;
    }
    try {
      each(j, ln);
    } catch (const LoadError&) {
      throw;
    } catch (const Error& e) {
      throw LoadError(source, ln, e.what());
    }
  }
}

}  // namespace detail

/// Parses a report file. Records may carry ground truth ("verdict",
/// "pattern_code"); it is returned when present.
inline std::vector<std::pair<IssueReport, std::optional<LabelRecord>>> read_report_file(
    std::string_view content, const std::string& source = "reports", bool require_verdict = false) {
  std::vector<std::pair<IssueReport, std::optional<LabelRecord>>> out;
  std::map<std::string, std::size_t> seen;
  detail::read_records(content, source, kReportsFormat, [&](const nlohmann::json& j, std::size_t ln) {
    auto r = report_from_json(j);
    if (auto [it, fresh] = seen.emplace(r.id, ln); !fresh)
      throw LoadError(source, ln, "duplicate id '" + r.id + "' (first on line " + std::to_string(it->second) + ")");
    std::optional<LabelRecord> label;
    if (j.contains("verdict")) {
      nlohmann::json lj{{"report_id", r.id}, {"verdict", j["verdict"]}};
      if (j.contains("pattern_code")) lj["pattern_code"] = j["pattern_code"];
      lj["labeler"] = j.value("labeler", "corpus");
      if (j.contains("labeled_at")) lj["labeled_at"] = j["labeled_at"];
      label = label_from_json(lj, r.created_at);
      check_label(*label);
    } else if (require_verdict) {
      throw LoadError(source, ln, "report '" + r.id + "' has no verdict");
    }
    out.emplace_back(std::move(r), std::move(label));
  });
  return out;
}

/// Reports only; ground-truth fields are ignored.
inline std::vector<IssueReport> ingest(std::string_view content, const std::string& source = "reports") {
  std::vector<IssueReport> out;
  for (auto& [r, l] : read_report_file(content, source)) out.push_back(std::move(r));
  return out;
}

/// Every record must carry a verdict.
inline std::vector<LabeledReport> read_labeled(std::string_view content, const std::string& source = "corpus") {
  std::vector<LabeledReport> out;
  for (auto& [r, l] : read_report_file(content, source, true)) out.push_back({std::move(r), std::move(*l)});
  return out;
}

inline std::vector<LabeledReport> load_labeled(const std::string& path) {
  return read_labeled(morph::Lexicon::read_file(path), path);
}

inline std::string write_labeled(const std::vector<LabeledReport>& corpus) {
  std::string out = header_json(kReportsFormat).dump() + "\n";
  for (const auto& lr : corpus) {
    auto j = to_json(lr.report);
    j["verdict"] = std::string(to_string(lr.label.verdict));
    if (lr.label.pattern_code) j["pattern_code"] = *lr.label.pattern_code;
    j["labeler"] = lr.label.labeler;
    if (lr.label.labeled_at != lr.report.created_at) j["labeled_at"] = format_timestamp(lr.label.labeled_at);
    out += j.dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distribution

struct DistributionRow {
  std::string project;
  std::size_t non_issue_count = 0;
  std::size_t issue_count = 0;
  std::size_t total = 0;
  double non_issue_pct = 0;

  friend bool operator==(const DistributionRow&, const DistributionRow&) = default;
};

struct Distribution {
  std::vector<DistributionRow> rows;  // sorted by project
  DistributionRow totals;
};

/// `labels` are (project, verdict) pairs of active labels.
inline Distribution distribution_of(const std::vector<std::pair<std::string, Verdict>>& labels) {
  std::map<std::string, DistributionRow> by_project;
  Distribution d;
  d.totals.project = "Total";
  auto bump = [](DistributionRow& row, Verdict v) {
    (v == Verdict::NonIssue ? row.non_issue_count : row.issue_count)++;
    ++row.total;
  };
  for (const auto& [project, v] : labels) {
    auto& row = by_project[project];
    row.project = project;
    bump(row, v);
    bump(d.totals, v);
  }
  auto pct = [](DistributionRow& row) {
    row.non_issue_pct = row.total ? 100.0 * static_cast<double>(row.non_issue_count) / static_cast<double>(row.total) : 0.0;
  };
  for (auto& [p, row] : by_project) {
    pct(row);
    d.rows.push_back(row);
  }
  pct(d.totals);
  return d;
}

inline std::string format_distribution(const Distribution& d) {
  std::size_t width = std::string("Project").size();
  for (const auto& r : d.rows) width = std::max(width, r.project.size());
  std::string out;
  char buf[512];
  const int w = static_cast<int>(width);
  std::snprintf(buf, sizeof buf, "%-*s  %16s  %6s  %5s\n", w, "Project", "#Non-Issue", "#Issue", "Total");
  out += buf;
  auto line = [&](const DistributionRow& r) {
    char ni[64];
    std::snprintf(ni, sizeof ni, "%zu (%.2f%%)", r.non_issue_count, r.non_issue_pct);
    std::snprintf(buf, sizeof buf, "%-*s  %16s  %6zu  %5zu\n", w, r.project.c_str(), ni, r.issue_count, r.total);
    out += buf;
  };
  for (const auto& r : d.rows) line(r);
  line(d.totals);
  return out;
}

inline nlohmann::ordered_json to_json(const Distribution& d) {
  auto row = [](const DistributionRow& r) {
    return nlohmann::ordered_json{{"project", r.project},
                                  {"non_issue_count", r.non_issue_count},
                                  {"issue_count", r.issue_count},
                                  {"total", r.total},
                                  {"non_issue_pct", r.non_issue_pct}};
  };
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : d.rows) rows.push_back(row(r));
  return {{"rows", rows}, {"totals", row(d.totals)}};
}

// ---------------------------------------------------------------------------
// Store

enum class Strategy { RoundRobinByProject, Fifo };

inline std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "RoundRobinByProject" || s == "round-robin") return Strategy::RoundRobinByProject;
  if (s == "Fifo" || s == "fifo") return Strategy::Fifo;
  return std::nullopt;
}

/// A directory holding reports.jsonl and labels.jsonl, both append-only.
/// Writers are serialized; readers share the lock and see whole records.
class Store {
 public:
  explicit Store(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    init_file(reports_path(), kReportsFormat);
    init_file(labels_path(), kLabelsFormat);
    for (auto& r : ingest(morph::Lexicon::read_file(reports_path().string()), reports_path().string())) index_report(std::move(r));
    detail::read_records(morph::Lexicon::read_file(labels_path().string()), labels_path().string(), kLabelsFormat,
                         [&](const nlohmann::json& j, std::size_t) {
                           auto l = label_from_json(j);
                           check_label(l);
                           if (!by_id_.count(l.report_id))
                             throw NotFoundError("label for unknown report '" + l.report_id + "'");
                           index_label(std::move(l));
                         });
  }

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  const std::filesystem::path& dir() const noexcept { return dir_; }

  /// All-or-nothing: a duplicate id (against the store or within the batch)
  /// rejects the whole batch.
  void add_reports(const std::vector<IssueReport>& batch) {
    std::unique_lock lock(mutex_);
    std::map<std::string, int> fresh;
    for (const auto& r : batch) {
      if (r.id.empty() || r.summary.empty()) throw ValidationError("report needs an id and a summary");
      if (by_id_.count(r.id) || !fresh.emplace(r.id, 0).second)
        throw ConflictError("duplicate report id '" + r.id + "'");
    }
    std::string lines;
    for (const auto& r : batch) lines += to_json(r).dump() + "\n";
    append(reports_path(), lines);
    for (const auto& r : batch) index_report(r);
  }

  /// Validates against `catalog`, then appends.
  void save_label(const LabelRecord& label, const patterns::Catalog& catalog) {
    std::unique_lock lock(mutex_);
    if (!by_id_.count(label.report_id)) throw NotFoundError("unknown report '" + label.report_id + "'");
    check_label(label, &catalog);
    append(labels_path(), to_json(label).dump() + "\n");
    index_label(label);
  }

  std::optional<IssueReport> report(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return reports_[it->second];
  }

  std::vector<IssueReport> reports() const {
    std::shared_lock lock(mutex_);
    return reports_;
  }

  std::optional<LabelRecord> active_label(const std::string& report_id) const {
    std::shared_lock lock(mutex_);
    auto it = active_.find(report_id);
    if (it == active_.end()) return std::nullopt;
    return labels_[it->second];
  }

  std::vector<LabelRecord> label_history() const {
    std::shared_lock lock(mutex_);
    return labels_;
  }

  std::size_t report_count() const {
    std::shared_lock lock(mutex_);
    return reports_.size();
  }

  std::size_t labeled_count() const {
    std::shared_lock lock(mutex_);
    return active_.size();
  }

  /// Active labels joined with their reports, in report insertion order.
  std::vector<LabeledReport> labeled() const {
    std::shared_lock lock(mutex_);
    std::vector<LabeledReport> out;
    for (const auto& r : reports_)
      if (auto it = active_.find(r.id); it != active_.end()) out.push_back({r, labels_[it->second]});
    return out;
  }

  /// Oldest first (created_at, then id). Round robin visits projects in
  /// name order, resuming after the project served last.
  std::optional<IssueReport> next_unlabeled(Strategy strategy) {
    std::unique_lock lock(mutex_);  // advances the cursor
    std::map<std::string, const IssueReport*> oldest;  // per project
    const IssueReport* global = nullptr;
    auto older = [](const IssueReport* a, const IssueReport* b) {
      return a->created_at != b->created_at ? a->created_at < b->created_at : a->id < b->id;
    };
    for (const auto& r : reports_) {
      if (active_.count(r.id)) continue;
      auto& slot = oldest[r.project];
      if (!slot || older(&r, slot)) slot = &r;
      if (!global || older(&r, global)) global = &r;
    }
    if (!global) return std::nullopt;
    if (strategy == Strategy::Fifo) return *global;
    auto it = cursor_ ? oldest.upper_bound(*cursor_) : oldest.begin();
    if (it == oldest.end()) it = oldest.begin();
    cursor_ = it->first;
    return *it->second;
  }

  Distribution distribution() const {
    std::shared_lock lock(mutex_);
    std::vector<std::pair<std::string, Verdict>> rows;
    for (const auto& [id, li] : active_) rows.emplace_back(reports_[by_id_.at(id)].project, labels_[li].verdict);
    return distribution_of(rows);
  }

 private:
  std::filesystem::path reports_path() const { return dir_ / "reports.jsonl"; }
  std::filesystem::path labels_path() const { return dir_ / "labels.jsonl"; }

  static void init_file(const std::filesystem::path& p, const char* format) {
    if (std::filesystem::exists(p) && std::filesystem::file_size(p) > 0) return;
    append(p, header_json(format).dump() + "\n");
  }

  static void append(const std::filesystem::path& p, const std::string& lines) {
    std::ofstream out(p, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot open '" + p.string() + "' for appending");
    out << lines;
    if (!out.flush()) throw Error("failed writing '" + p.string() + "'");
  }

  void index_report(IssueReport r) {
    by_id_.emplace(r.id, reports_.size());
    reports_.push_back(std::move(r));
  }

  void index_label(LabelRecord l) {
    const std::size_t idx = labels_.size();
    auto it = active_.find(l.report_id);
    // later insertion wins ties
    if (it == active_.end()) active_.emplace(l.report_id, idx);
    else if (l.labeled_at >= labels_[it->second].labeled_at) it->second = idx;
    labels_.push_back(std::move(l));
  }

  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  std::vector<IssueReport> reports_;
  std::map<std::string, std::size_t> by_id_;
  std::vector<LabelRecord> labels_;
  std::map<std::string, std::size_t> active_;  // report id -> index into labels_
  std::optional<std::string> cursor_;
};

// ---------------------------------------------------------------------------
// Synthetic corpus

struct ProjectShare {
  std::string name;
  std::size_t reports = 0;     // weight for the report allocation
  std::size_t non_issues = 0;  // weight for the NonIssue allocation
};

/// The ten projects of the reference distribution with their report and
/// non-issue counts.
inline std::vector<ProjectShare> reference_projects() {
  return {{"Bancassurance", 114, 18},
          {"Collateral Management", 109, 13},
          {"Commercial Loans Allocation", 178, 9},
          {"Commercial Loans Disbursement", 98, 1},
          {"Consumer Loan Services", 76, 0},
          {"Credit Cards", 157, 40},
          {"Customer Information Management", 101, 22},
          {"Deposits", 71, 5},
          {"Foreign Currency Transfers", 151, 32},
          {"Personal Loans Allocation", 145, 19}};
}

struct GeneratorConfig {
  std::size_t n = 1200;
  double prevalence = 0.1325;
  double pattern_free_fraction = 0.10;
  std::uint64_t seed = 0;
  std::vector<ProjectShare> projects = reference_projects();
  Timestamp start = 1546329600;  // 2019-01-01T08:00:00Z

  void validate() const {
    if (!(prevalence >= 0 && prevalence <= 1)) throw ValidationError("prevalence must lie in [0, 1]");
    if (!(pattern_free_fraction >= 0 && pattern_free_fraction <= 1))
      throw ValidationError("pattern-free fraction must lie in [0, 1]");
    if (projects.empty()) throw ValidationError("generator needs at least one project");
    std::size_t w = 0;
    for (const auto& p : projects) w += p.reports;
    if (w == 0) throw ValidationError("project report weights sum to zero");
  }
};

/// floor(x + 0.5) for the non-negative counts used here.
inline std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

/// Largest-remainder split of `total` proportional to `weights`, never
/// exceeding `caps`; ties go to the earlier entry.
inline std::vector<std::size_t> apportion(std::size_t total, const std::vector<std::size_t>& weights,
                                          const std::vector<std::size_t>& caps) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> out(n, 0);
  std::size_t cap_sum = 0;
  for (auto c : caps) cap_sum += c;
  if (total > cap_sum) throw ValidationError("cannot place " + std::to_string(total) + " items in " + std::to_string(cap_sum) + " slots");
  std::size_t left = total;
  while (left > 0) {
    std::vector<std::size_t> open;
    double wsum = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (out[i] < caps[i]) {
        open.push_back(i);
        wsum += static_cast<double>(weights[i]);
      }
    if (wsum == 0) {  // only zero-weight slots remain: fill them in order
      for (std::size_t i : open) {
        const std::size_t take = std::min(left, caps[i] - out[i]);
        out[i] += take;
        left -= take;
      }
      break;
    }
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t given = 0;
    for (std::size_t i : open) {
      const double q = static_cast<double>(left) * static_cast<double>(weights[i]) / wsum;
      std::size_t whole = std::min(static_cast<std::size_t>(q), caps[i] - out[i]);
      out[i] += whole;
      given += whole;
      if (out[i] < caps[i]) rem.emplace_back(q - std::floor(q), i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::size_t still = left - given;
    for (const auto& [frac, i] : rem) {
      if (still == 0) break;
      if (weights[i] == 0) continue;
      ++out[i];
      --still;
    }
    left = still;
  }
  return out;
}

namespace detail {

struct Rng {
  std::mt19937_64 engine;
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine() % n); }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  bool chance(unsigned percent) { return below(100) < percent; }
  std::string digits(int count) {
    std::string s(1, static_cast<char>('1' + below(9)));
    while (static_cast<int>(s.size()) < count) s.push_back(static_cast<char>('0' + below(10)));
    return s;
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }
};

/// Fills {N} (number), {G} (genitive subject), {O} (object noun phrase),
/// {A} (accusative object) in a template.
inline std::string fill(std::string t, Rng& rng) {
  static const std::vector<std::string> genitive{
      "Başvurunun", "Kaydın",        "Poliçenin",        "Müşteri kaydının", "Kartın",   "Hesabın",
      "Teklifin",   "Dosyanın",      "Teminat kaydının", "Sözleşmenin",      "Talebin",  "Kredi başvurusunun",
      "Ekstrenin",  "Havale kaydının", "Senedin",          "Aday müşterinin"};
  static const std::vector<std::string> object{
      "kredi kartı",   "poliçe",          "teminat kaydı", "müşteri hesabı", "havale işlemi", "taksit planı",
      "ipotek kaydı",  "döviz transferi", "mevduat hesabı", "kredi başvurusu", "kefil bilgisi", "fatura",
      "ekstre",        "EFT işlemi",      "vade bilgisi",  "komisyon tutarı", "limit bilgisi", "dekont"};
  static const std::vector<std::string> accusative{
      "poliçe numarasını", "müşteri numarasını", "hesap bakiyesini", "kart limitini", "faiz oranını",
      "vade tarihini",     "işlem durumunu",     "başvuru sonucunu", "teminat tutarını", "taksit sayısını"};
  for (;;) {
    auto pos = t.find('{');
    if (pos == std::string::npos) return t;
    const char key = t[pos + 1];
    std::string value;
    if (key == 'N') value = rng.digits(6 + static_cast<int>(rng.below(4)));
    else if (key == 'G') value = rng.pick(genitive);
    else if (key == 'O') value = rng.pick(object);
    else if (key == 'A') value = rng.pick(accusative);
    t.replace(pos, 3, value);
  }
}

struct Template {
  const char* code;  // ground-truth pattern code; nullptr for issues
  const char* summary;
  const char* sentence;
};

inline const std::vector<Template>& non_issue_templates() {
  static const std::vector<Template> t{
      {"NI_REQUEST", "{O} arşiv talebi", "{G} arşive kaldırılmasını rica ederiz."},
      {"NI_REQUEST", "{O} arşivleme", "{N} nolu {O} kaydının arşive alınmasını rica ederiz."},
      {"NI_REQUEST", "{O} silme talebi", "{G} sistemden silinmesini rica ederiz."},
      {"NI_REQUEST", "Kayıt silme", "{N} nolu {O} kaydının silinmesi talep edilmektedir."},
      {"NI_REQUEST", "{O} güncelleme talebi", "{G} bilgilerinin güncel olmasını rica ederiz."},
      {"NI_REQUEST", "{O} bilgisi", "{O} bilgisinin güncel tutulması rica olunur."},
      {"NI_YESNO_QUESTION", "{O} hakkında soru", "{A} öğrenebilir miyiz?"},
      {"NI_YESNO_QUESTION", "{O} bilgi", "{N} nolu işlem için {A} görebilir miyiz?"},
      {"NI_YESNO_QUESTION", "{O} sorgu", "{O} ekranında {A} değiştirebilir miyiz?"},
      {"NI_WHY_QUESTION", "{O} iptali hk.", "Neden {O} iptal edildi?"},
      {"NI_WHY_QUESTION", "{O} sorusu", "{N} nolu {O} neden farklı görünüyor?"},
      {"NI_POSSIBLE", "{O} talebi", "{O} tekrar gönderilmesi mümkün mü?"},
      {"NI_POSSIBLE", "{O} limit artışı", "{G} limitinin artırılması mümkün müdür?"},
      {"NI_INADVERTENTLY", "Hatalı kayıt", "{N} nolu aday müşteri sehven yaratılmıştır."},
      {"NI_INADVERTENTLY", "{O} kaydı", "{O} kaydı sehven girilmiştir."},
  };
  return t;
}

/// Requests phrased without any catalog trigger.
inline const std::vector<Template>& pattern_free_templates() {
  static const std::vector<Template> t{
      {"NI_REQUEST", "{O} kapatma talebi", "{G} kapatılmasını rica ederiz."},
      {"NI_REQUEST", "{O} raporu", "{O} raporunun tarafımıza iletilmesini rica ederiz."},
      {"NI_REQUEST", "Yetki talebi", "{O} ekranı için yetki tanımlanmasını rica ederiz."},
      {"NI_REQUEST", "{O} bildirimi", "{G} müşteriye bildirilmesini rica ederiz."},
  };
  return t;
}

inline const std::vector<Template>& issue_templates() {
  static const std::vector<Template> t{
      {nullptr, "{O} ekranı açılmıyor", "{O} ekranı açılamadı."},
      {nullptr, "{O} hatası", "{N} nolu {O} kaydı bulunamadı."},
      {nullptr, "{O} güncelleme hatası", "{O} bilgileri güncellenemedi."},
      {nullptr, "{O} aktarım sorunu", "{O} sisteme aktarılamadı."},
      {nullptr, "{O} hesaplama hatası", "{O} tutarı doğru hesaplanmadı."},
      {nullptr, "{O} ekranı", "{O} bilgisi ekranda gösterilmeli."},
      {nullptr, "{O} raporu", "{O} raporu her gün oluşturulmalı."},
      {nullptr, "{O} işlemi", "{O} işlemi dün tamamlanmalıydı."},
      {nullptr, "{O} bildirimi gelmedi", "{O} onay mesajı müşteriye gönderilmedi."},
      {nullptr, "Gün sonu hatası", "Gün sonu işi çalışmadı ve {O} oluşmadı."},
      {nullptr, "{O} kayıt hatası", "Sistem hata verdi ve {O} kaydedilemedi."},
      {nullptr, "{O} ödeme sorunu", "{N} nolu {O} için ödeme alınamadı."},
      {nullptr, "{O} limit hatası", "{O} limiti yanlış gösterildi ve düzeltilmeli."},
      {nullptr, "{O} onay hatası", "{O} onaylanamadı."},
  };
  return t;
}

inline const std::vector<std::string>& issue_followups() {
  static const std::vector<std::string> t{
      "Hata kodu {N} olarak görüntülendi.", "Müşteri şubeden işlem yapamadı.", "Acil çözüm bekliyoruz.",
      "Kontrol edilmeli.",                 "Ekran görüntüsü eklenmiştir.",     "Sorun dünden beri devam ediyor.",
  };
  return t;
}

inline const std::vector<std::string>& shared_summaries() {
  static const std::vector<std::string> t{"{O} hk.", "{O}", "{O} kaydı", "Bilgi"};
  return t;
}

/// Uppercases a leading ASCII letter, with the Turkish dotted capital for i.
inline void capitalize(std::string& s) {
  if (s.empty() || static_cast<unsigned char>(s[0]) >= 0x80) return;
  if (s[0] == 'i') s.replace(0, 1, "İ");
  else s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
}

inline const std::vector<std::string>& shared_followups() {
  static const std::vector<std::string> t{"İyi çalışmalar.", "Teşekkürler.", "Bilgilerinize sunarız.",
                                          "{O} ile ilgili detaylar ektedir."};
  return t;
}

}  // namespace detail

/// Seeded stand-in corpus: per-project counts follow `projects`, NonIssue
/// reports are rendered from pattern templates (a fraction from trigger-free
/// paraphrases) and Issue reports from negative or obligative verb forms.
inline std::vector<LabeledReport> generate_synthetic(const GeneratorConfig& config) {
  config.validate();
  const std::size_t np = config.projects.size();
  std::vector<std::size_t> report_w, ni_w, unbounded(np, config.n);
  for (const auto& p : config.projects) {
    report_w.push_back(p.reports);
    ni_w.push_back(p.non_issues);
  }
  const auto per_project = apportion(config.n, report_w, unbounded);
  const std::size_t total_ni = round_half_up(static_cast<double>(config.n) * config.prevalence);
  const auto ni_per_project = apportion(total_ni, ni_w, per_project);
  const std::size_t pattern_free = round_half_up(static_cast<double>(total_ni) * config.pattern_free_fraction);

  detail::Rng rng{std::mt19937_64(config.seed)};

  // (project, verdict) slots, shuffled into creation order
  std::vector<std::pair<std::size_t, bool>> slots;
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t i = 0; i < per_project[p]; ++i) slots.emplace_back(p, i < ni_per_project[p]);
  rng.shuffle(slots);

  // which NonIssue reports (by order of appearance) are paraphrased
  std::vector<bool> paraphrase(total_ni, false);
  for (std::size_t i = 0; i < pattern_free; ++i) paraphrase[i] = true;
  rng.shuffle(paraphrase);

  std::vector<LabeledReport> out;
  out.reserve(config.n);
  std::size_t ni_seen = 0;
  Timestamp t = config.start;
  const int id_width = std::max<int>(4, static_cast<int>(std::to_string(config.n).size()));
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto [p, non_issue] = slots[k];
    const detail::Template* tpl;
    if (non_issue) tpl = &rng.pick(paraphrase[ni_seen++] ? detail::pattern_free_templates() : detail::non_issue_templates());
    else tpl = &rng.pick(detail::issue_templates());

    std::string summary = detail::fill(rng.chance(30) ? rng.pick(detail::shared_summaries()) : tpl->summary, rng);
    std::string description = detail::fill(tpl->sentence, rng);
    auto follow = [&](const std::vector<std::string>& pool) {
      std::string s = detail::fill(rng.pick(pool), rng);
      detail::capitalize(s);
      description += " " + s;
    };
    detail::capitalize(summary);
    detail::capitalize(description);
    if (!non_issue && rng.chance(50)) follow(detail::issue_followups());
    if (rng.chance(40)) follow(detail::shared_followups());

    std::string id = std::to_string(k + 1);
    id = "SYN-" + std::string(id.size() < static_cast<std::size_t>(id_width) ? id_width - id.size() : 0, '0') + id;
    t += 600 + static_cast<Timestamp>(rng.below(7200));

    LabeledReport lr;
    lr.report = {id, config.projects[p].name, summary, description, t};
    lr.label.report_id = id;
    lr.label.verdict = non_issue ? Verdict::NonIssue : Verdict::Issue;
    if (non_issue) lr.label.pattern_code = tpl->code;
    lr.label.labeler = "generator";
    lr.label.labeled_at = t;
    out.push_back(std::move(lr));
  }
  return out;
}

}  // namespace triage::corpus
