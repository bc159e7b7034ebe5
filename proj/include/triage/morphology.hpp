#pragma once

// Root + suffix decomposition of Turkish words: a lexicon of roots, a table
// of suffix allomorph archetypes ordered by slot, and surface resolution by
// vowel harmony, consonant assimilation and buffer letters.

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>  // std::tie
#include <utility>
#include <vector>

#include "triage/error.hpp"
#include "triage/text.hpp"

namespace triage::morph {

enum class Pos { Verb, Noun, Adjective, Adverb, Other };

enum class Tag {
  Passive,
  Causative,
  Ability,
  Negative,
  PastTense,
  Obligative,
  VerbalNoun,
  FirstPersonPlural,
  ThirdPersonSingular,
  CopularPast,
  Possessive3sg,
  CaseMarker,
  QuestionParticle,
};

inline constexpr std::array<std::pair<Pos, std::string_view>, 5> kPosNames{{
    {Pos::Verb, "Verb"},
    {Pos::Noun, "Noun"},
    {Pos::Adjective, "Adjective"},
    {Pos::Adverb, "Adverb"},
    {Pos::Other, "Other"},
}};

inline constexpr std::array<std::pair<Tag, std::string_view>, 13> kTagNames{{
    {Tag::Passive, "Passive"},
    {Tag::Causative, "Causative"},
    {Tag::Ability, "Ability"},
    {Tag::Negative, "Negative"},
    {Tag::PastTense, "PastTense"},
    {Tag::Obligative, "Obligative"},
    {Tag::VerbalNoun, "VerbalNoun"},
    {Tag::FirstPersonPlural, "FirstPersonPlural"},
    {Tag::ThirdPersonSingular, "ThirdPersonSingular"},
    {Tag::CopularPast, "CopularPast"},
    {Tag::Possessive3sg, "Possessive3sg"},
    {Tag::CaseMarker, "CaseMarker"},
    {Tag::QuestionParticle, "QuestionParticle"},
}};

inline std::string_view to_string(Pos p) {
  for (auto [v, n] : kPosNames)
    if (v == p) return n;
  return "Other";
}

inline std::string_view to_string(Tag t) {
  for (auto [v, n] : kTagNames)
    if (v == t) return n;
  return "?";
}

inline std::optional<Pos> parse_pos(std::string_view s) {
  for (auto [v, n] : kPosNames)
    if (n == s) return v;
  return std::nullopt;
}

inline std::optional<Tag> parse_tag(std::string_view s) {
  for (auto [v, n] : kTagNames)
    if (n == s) return v;
  return std::nullopt;
}

/// Frontness override for roots that break regular harmony (loanwords such
/// as "saat" or "kontrol").
enum class Harmony { Regular, Front, Back };

/// Raised when a suffix has to be attached to a stem without any vowel.
class NoHarmonyAnchor : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// ---------------------------------------------------------------------------
// Archetypes

/// A parsed suffix meta-form. Meta-symbols: A in {a,e}, I in {ı,i,u,ü},
/// D in {d,t}. A leading parenthesized group is a buffer that appears only
/// when needed: a consonant buffer after a vowel-final stem, a vowel buffer
/// after a consonant-final stem.
class Archetype {
 public:
  static Archetype parse(std::string_view form) {
    const std::u32string s = text::decode(form);
    Archetype a;
    a.form_ = std::string(form);
    std::size_t i = 0;
    if (!s.empty() && s[0] == U'(') {
      const auto close = s.find(U')');
      if (close == std::u32string::npos) throw ValidationError("archetype '" + a.form_ + "': unbalanced '('");
      if (close == 1) throw ValidationError("archetype '" + a.form_ + "': empty buffer group");
      a.buffer_ = s.substr(1, close - 1);
      i = close + 1;
    }
    a.body_ = s.substr(i);
    if (a.body_.empty()) throw ValidationError("archetype '" + a.form_ + "': no suffix body");
    auto check = [&](std::u32string_view part) {
      for (char32_t c : part) {
        if (c == U'(' || c == U')') throw ValidationError("archetype '" + a.form_ + "': misplaced parenthesis");
        if (c == U'A' || c == U'I' || c == U'D') continue;
        if (!text::is_turkish_letter(c))
          throw ValidationError("archetype '" + a.form_ + "': invalid symbol '" + text::encode(std::u32string(1, c)) +
                                "'");
      }
    };
    check(a.buffer_);
    check(a.body_);
    return a;
  }

  const std::string& form() const noexcept { return form_; }

  /// Surface realization after `stem`. `root_harmony` applies only while the
  /// harmony anchor is still the stem's own last vowel.
  std::u32string resolve(std::u32string_view stem, Harmony root_harmony = Harmony::Regular) const {
    if (stem.empty()) throw NoHarmonyAnchor("empty stem");
    char32_t anchor = 0;
    for (auto it = stem.rbegin(); it != stem.rend(); ++it) {
      if (text::is_vowel(*it)) {
        anchor = *it;
        break;
      }
    }
    if (anchor == 0) throw NoHarmonyAnchor("stem '" + text::encode(stem) + "' has no vowel");

    bool front = text::is_front_vowel(anchor);
    if (root_harmony == Harmony::Front) front = true;
    if (root_harmony == Harmony::Back) front = false;
    bool rounded = text::is_rounded_vowel(anchor);
    char32_t last = stem.back();

    std::u32string out;
    auto emit = [&](char32_t sym) {
      char32_t c = sym;
      if (sym == U'A') {
        c = front ? U'e' : U'a';
      } else if (sym == U'I') {
        c = front ? (rounded ? U'ü' : U'i') : (rounded ? U'u' : U'ı');
      } else if (sym == U'D') {
        c = text::is_voiceless(last) ? U't' : U'd';
      }
      if (text::is_vowel(c)) {
        front = text::is_front_vowel(c);
        rounded = text::is_rounded_vowel(c);
      }
      out.push_back(c);
      last = c;
    };

    if (!buffer_.empty()) {
      const char32_t first = buffer_.front();
      const bool vowel_buffer = first == U'A' || first == U'I' || text::is_vowel(first);
      if (vowel_buffer != text::is_vowel(last))
        for (char32_t c : buffer_) emit(c);
    }
    for (char32_t c : body_) emit(c);
    return out;
  }

 private:
  std::string form_;
  std::u32string buffer_;
  std::u32string body_;
};

/// Surface suffix for `archetype` attached to `stem` (both UTF-8).
inline std::string resolve_surface(std::string_view archetype, std::string_view stem,
                                   Harmony root_harmony = Harmony::Regular) {
  return text::encode(Archetype::parse(archetype).resolve(text::to_lower(text::decode(stem)), root_harmony));
}

// ---------------------------------------------------------------------------
// Lexicon and suffix rules

struct LexiconEntry {
  std::string root;
  Pos pos = Pos::Noun;
  int priority = 0;
  Harmony harmony = Harmony::Regular;
  /// Final p/ç/t/k voices (b/c/d/ğ) before a vowel-initial suffix.
  bool softens = false;
};

class Lexicon {
 public:
  void add(LexiconEntry e) {
    const std::u32string r = text::decode(e.root);
    if (r.empty()) throw ValidationError("lexicon root is empty");
    for (char32_t c : r)
      if (!text::is_turkish_letter(c))
        throw ValidationError("lexicon root '" + e.root + "' has a non-Turkish or uppercase letter");
    for (const auto& x : entries_)
      if (x.root == e.root && x.pos == e.pos)
        throw ValidationError("duplicate lexicon entry '" + e.root + "' (" + std::string(to_string(e.pos)) + ")");
    entries_.push_back(std::move(e));
  }

  const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Format: `root<TAB>pos<TAB>priority[<TAB>flags]`, flags a comma list of
  /// front|back|soften. Blank lines and lines starting with '#' are skipped.
  static Lexicon parse(std::string_view content, const std::string& source = "lexicon") {
    Lexicon lex;
    std::size_t lineno = 0;
    for (const auto& line : split_lines(content)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      const auto f = split(line, '\t');
      if (f.size() < 3 || f.size() > 4) throw LoadError(source, lineno, "expected root<TAB>pos<TAB>priority[<TAB>flags]");
      LexiconEntry e;
      e.root = f[0];
      const auto pos = parse_pos(f[1]);
      if (!pos) throw LoadError(source, lineno, "unknown part of speech '" + f[1] + "'");
      e.pos = *pos;
      try {
        std::size_t used = 0;
        e.priority = std::stoi(f[2], &used);
        if (used != f[2].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw LoadError(source, lineno, "priority '" + f[2] + "' is not an integer");
      }
      if (f.size() == 4) {
        for (const auto& flag : split(f[3], ',')) {
          if (flag == "front") e.harmony = Harmony::Front;
          else if (flag == "back") e.harmony = Harmony::Back;
          else if (flag == "soften") e.softens = true;
          else if (!flag.empty() && flag != "-") throw LoadError(source, lineno, "unknown flag '" + flag + "'");
        }
      }
      try {
        lex.add(std::move(e));
      } catch (const ValidationError& err) {
        throw LoadError(source, lineno, err.what());
      }
    }
    return lex;
  }

  static Lexicon load(const std::string& path) { return parse(read_file(path), path); }

  static std::vector<std::string> split_lines(std::string_view content) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < content.size()) {
      auto end = content.find('\n', start);
      if (end == std::string_view::npos) end = content.size();
      std::string line(content.substr(start, end - start));
      if (!line.empty() && line.back() == '\r') line.pop_back();
      out.push_back(std::move(line));
      start = end + 1;
    }
    return out;
  }

  static std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      const auto end = s.find(sep, start);
      out.emplace_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
    return out;
  }

  static std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

 private:
  std::vector<LexiconEntry> entries_;
};

struct SuffixRule {
  Tag tag = Tag::CaseMarker;
  std::string archetype;
  int slot = 0;
};

class SuffixRules {
 public:
  void add(SuffixRule r) {
    parsed_.push_back(Archetype::parse(r.archetype));
    rules_.push_back(std::move(r));
  }

  const std::vector<SuffixRule>& rules() const noexcept { return rules_; }
  const Archetype& archetype(std::size_t i) const { return parsed_.at(i); }
  std::size_t size() const noexcept { return rules_.size(); }

  /// Format: `tag<TAB>archetype<TAB>slot`; '#' comments and blank lines skipped.
  static SuffixRules parse(std::string_view content, const std::string& source = "suffixes") {
    SuffixRules rules;
    std::size_t lineno = 0;
    for (const auto& line : Lexicon::split_lines(content)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      const auto f = Lexicon::split(line, '\t');
      if (f.size() != 3) throw LoadError(source, lineno, "expected tag<TAB>archetype<TAB>slot");
      const auto tag = parse_tag(f[0]);
      if (!tag) throw LoadError(source, lineno, "unknown tag '" + f[0] + "'");
      SuffixRule r{*tag, f[1], 0};
      try {
        std::size_t used = 0;
        r.slot = std::stoi(f[2], &used);
        if (used != f[2].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw LoadError(source, lineno, "slot '" + f[2] + "' is not an integer");
      }
      try {
        rules.add(std::move(r));
      } catch (const ValidationError& err) {
        throw LoadError(source, lineno, err.what());
      }
    }
    return rules;
  }

  static SuffixRules load(const std::string& path) { return parse(Lexicon::read_file(path), path); }

 private:
  std::vector<SuffixRule> rules_;
  std::vector<Archetype> parsed_;
};

// ---------------------------------------------------------------------------
// Morphotactics

/// Which suffix classes a stem accepts at a given point of the derivation.
enum class StemState { Verbal, Nominal, Closed };

inline StemState initial_state(Pos pos) {
  switch (pos) {
    case Pos::Verb:
      return StemState::Verbal;
    case Pos::Noun:
    case Pos::Adjective:
      return StemState::Nominal;
    default:
      return StemState::Closed;
  }
}

/// Whether `next` may follow the derivation so far. Slots never decrease;
/// the tag decides which stem class it needs.
inline bool admissible(StemState state, std::optional<Tag> last_tag, int last_slot, Tag next, int next_slot) {
  if (next_slot < last_slot) return false;
  switch (next) {
    case Tag::Passive:
    case Tag::Causative:
    case Tag::Ability:
    case Tag::Negative:
    case Tag::PastTense:
    case Tag::Obligative:
    case Tag::VerbalNoun:
      return state == StemState::Verbal;
    case Tag::Possessive3sg:
    case Tag::CaseMarker:
      return state == StemState::Nominal;
    case Tag::CopularPast:
      return state == StemState::Nominal || (state == StemState::Verbal && last_tag == Tag::Obligative);
    case Tag::FirstPersonPlural:
      return last_tag == Tag::PastTense || last_tag == Tag::CopularPast;
    case Tag::ThirdPersonSingular:  // zero morph, never attached from the table
    case Tag::QuestionParticle:     // separate word in standard orthography
      return false;
  }
  return false;
}

inline StemState next_state(StemState state, Tag attached) {
  return attached == Tag::VerbalNoun ? StemState::Nominal : state;
}

/// Finite forms without an overt person marker get a zero third person.
inline bool takes_zero_person(Tag last) {
  return last == Tag::PastTense || last == Tag::Obligative || last == Tag::CopularPast;
}

// ---------------------------------------------------------------------------
// Analysis

struct MorphAnalysis {
  std::string root;
  Pos pos = Pos::Noun;
  std::vector<Tag> tags;
  std::vector<std::string> segmentation;

  friend bool operator==(const MorphAnalysis&, const MorphAnalysis&) = default;
};

inline std::string tags_to_string(const std::vector<Tag>& tags, std::string_view sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out += sep;
    out += to_string(tags[i]);
  }
  return out;
}

/// Stem with its final consonant voiced, e.g. hesap -> hesab, renk -> reng.
inline std::optional<std::u32string> softened(std::u32string_view root) {
  if (root.size() < 2) return std::nullopt;
  std::u32string s(root);
  char32_t& c = s.back();
  const char32_t before = s[s.size() - 2];
  switch (c) {
    case U'p': c = U'b'; break;
    case U'ç': c = U'c'; break;
    case U't': c = U'd'; break;
    case U'k': c = (before == U'n') ? U'g' : U'ğ'; break;
    default: return std::nullopt;
  }
  return s;
}

/// Immutable analyzer; every member function is const and thread-safe.
class Analyzer {
 public:
  Analyzer(Lexicon lexicon, SuffixRules rules) : lexicon_(std::move(lexicon)), rules_(std::move(rules)) {
    for (std::size_t i = 0; i < lexicon_.entries().size(); ++i) {
      const auto r = text::decode(lexicon_.entries()[i].root);
      roots_.push_back(r);
      by_initial_[r.front()].push_back(i);
    }
  }

  const Lexicon& lexicon() const noexcept { return lexicon_; }
  const SuffixRules& rules() const noexcept { return rules_; }

  /// All analyses of `word`, best first: fewest tags, then higher root
  /// priority, then longer root.
  std::vector<MorphAnalysis> analyze(std::string_view word) const {
    const std::u32string w = text::to_lower(text::decode(word));
    std::vector<Candidate> found;
    if (w.empty()) return {};
    const auto bucket = by_initial_.find(w.front());
    if (bucket == by_initial_.end()) return {};

    for (std::size_t idx : bucket->second) {
      const auto& entry = lexicon_.entries()[idx];
      const std::u32string& root = roots_[idx];
      Path path{idx, {}, {}};
      if (text::starts_with(w, root)) {
        path.segments = {root};
        extend(w, root.size(), root, entry, initial_state(entry.pos), std::nullopt, INT_MIN_SLOT, true, path, found,
               entry.softens ? First::ConsonantInitial : First::Any);
      }
      if (entry.softens) {
        if (auto soft = softened(root); soft && text::starts_with(w, *soft) && soft->size() < w.size() &&
                                        text::is_vowel(w[soft->size()])) {
          path.segments = {*soft};
          path.tags.clear();
          extend(w, soft->size(), *soft, entry, initial_state(entry.pos), std::nullopt, INT_MIN_SLOT, true, path,
                 found, First::VowelInitial);
        }
      }
    }

    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end(),
                            [](const Candidate& a, const Candidate& b) { return a.analysis == b.analysis; }),
                found.end());
    std::vector<MorphAnalysis> out;
    out.reserve(found.size());
    for (auto& c : found) out.push_back(std::move(c.analysis));
    return out;
  }

  /// Best analysis, if any.
  std::optional<MorphAnalysis> best(std::string_view word) const {
    auto all = analyze(word);
    if (all.empty()) return std::nullopt;
    return std::move(all.front());
  }

  /// (token index, best analysis) for every token whose best analysis is a verb.
  std::vector<std::pair<std::size_t, MorphAnalysis>> detect_verbs(const std::vector<std::string>& tokens) const {
    std::vector<std::pair<std::size_t, MorphAnalysis>> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto b = best(tokens[i]);
      if (b && b->pos == Pos::Verb) out.emplace_back(i, std::move(*b));
    }
    return out;
  }

 private:
  static constexpr int INT_MIN_SLOT = -2147483647;

  /// Constraint on the next suffix imposed by a softening root: the voiced
  /// stem needs a vowel-initial suffix, the plain stem refuses one.
  enum class First { Any, VowelInitial, ConsonantInitial };

  struct Path {
    std::size_t entry;
    std::vector<std::u32string> segments;
    std::vector<Tag> tags;
  };

  struct Candidate {
    MorphAnalysis analysis;
    int priority;
    std::size_t root_length;
    std::vector<int> tag_codes;

    bool operator<(const Candidate& o) const {
      if (analysis.tags.size() != o.analysis.tags.size()) return analysis.tags.size() < o.analysis.tags.size();
      if (priority != o.priority) return priority > o.priority;
      if (root_length != o.root_length) return root_length > o.root_length;
      // remaining keys only make the order total
      return std::tie(tag_codes, analysis.root, analysis.segmentation) <
             std::tie(o.tag_codes, o.analysis.root, o.analysis.segmentation);
    }
  };

  void extend(const std::u32string& word, std::size_t consumed, const std::u32string& stem, const LexiconEntry& entry,
              StemState state, std::optional<Tag> last_tag, int last_slot, bool anchor_in_root, Path& path,
              std::vector<Candidate>& found, First first = First::Any) const {
    if (consumed == word.size() && first != First::VowelInitial) {
      Candidate c;
      c.analysis.root = entry.root;
      c.analysis.pos = entry.pos;
      c.analysis.tags = path.tags;
      if (last_tag && takes_zero_person(*last_tag)) c.analysis.tags.push_back(Tag::ThirdPersonSingular);
      for (const auto& s : path.segments) c.analysis.segmentation.push_back(text::encode(s));
      c.priority = entry.priority;
      c.root_length = text::decode(entry.root).size();
      for (Tag t : c.analysis.tags) c.tag_codes.push_back(static_cast<int>(t));
      found.push_back(std::move(c));
      return;
    }
    if (consumed == word.size()) return;

    for (std::size_t i = 0; i < rules_.size(); ++i) {
      const auto& rule = rules_.rules()[i];
      if (!admissible(state, last_tag, last_slot, rule.tag, rule.slot)) continue;
      std::u32string surface;
      try {
        surface = rules_.archetype(i).resolve(stem, anchor_in_root ? entry.harmony : Harmony::Regular);
      } catch (const NoHarmonyAnchor&) {
        return;
      }
      if (surface.empty() || word.compare(consumed, surface.size(), surface) != 0) continue;
      if (first == First::VowelInitial && !text::is_vowel(surface.front())) continue;
      if (first == First::ConsonantInitial && text::is_vowel(surface.front())) continue;

      bool has_vowel = false;
      for (char32_t c : surface) has_vowel = has_vowel || text::is_vowel(c);

      path.segments.push_back(surface);
      path.tags.push_back(rule.tag);
      extend(word, consumed + surface.size(), stem + surface, entry, next_state(state, rule.tag), rule.tag, rule.slot,
             anchor_in_root && !has_vowel, path, found);
      path.segments.pop_back();
      path.tags.pop_back();
    }
  }

  Lexicon lexicon_;
  SuffixRules rules_;
  std::vector<std::u32string> roots_;
  std::map<char32_t, std::vector<std::size_t>> by_initial_;
};

}  // namespace triage::morph
