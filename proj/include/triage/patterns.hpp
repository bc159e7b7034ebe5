#pragma once

// Catalog of non-issue discourse patterns and the sentence-level matcher.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "triage/error.hpp"
#include "triage/morphology.hpp"
#include "triage/tokenizer.hpp"

namespace triage::patterns {

enum class Scope { Sentence, Document };

/// Either a contiguous tag sequence a token's analysis must contain, or the
/// standalone question particle.
struct SuffixTrigger {
  bool question_particle = false;
  std::vector<morph::Tag> tags;

  friend bool operator==(const SuffixTrigger&, const SuffixTrigger&) = default;
};

struct PatternRule {
  std::string code;
  std::vector<std::string> trigger_roots;  // sorted, unique, lowercase
  std::optional<SuffixTrigger> trigger_suffix;
  Scope scope = Scope::Sentence;

  bool requires_root() const { return !trigger_roots.empty(); }
  bool requires_suffix() const { return trigger_suffix.has_value(); }
  bool has_root(const std::string& r) const {
    return std::binary_search(trigger_roots.begin(), trigger_roots.end(), r);
  }

  friend bool operator==(const PatternRule&, const PatternRule&) = default;
};

enum class Reason { RootHit, SuffixHit, ParticleHit };

inline std::string_view to_string(Reason r) {
  switch (r) {
    case Reason::RootHit: return "RootHit";
    case Reason::SuffixHit: return "SuffixHit";
    case Reason::ParticleHit: return "ParticleHit";
  }
  return "?";
}

struct Evidence {
  std::size_t token = 0;
  Reason reason = Reason::RootHit;

  friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct PatternMatch {
  std::string code;
  std::size_t sentence_index = 0;
  std::vector<Evidence> evidence;

  friend bool operator==(const PatternMatch&, const PatternMatch&) = default;
};

inline bool valid_code(std::string_view code) {
  if (code.size() <= 3 || code.substr(0, 3) != "NI_") return false;
  return std::all_of(code.begin() + 3, code.end(), [](char c) { return (c >= 'A' && c <= 'Z') || c == '_'; });
}

inline std::optional<SuffixTrigger> parse_suffix_descriptor(std::string_view s) {
  if (s == "-") return std::nullopt;
  SuffixTrigger t;
  if (s == "QuestionParticle") {
    t.question_particle = true;
    return t;
  }
  for (const auto& part : morph::Lexicon::split(s, '+')) {
    const auto tag = morph::parse_tag(part);
    if (!tag || *tag == morph::Tag::QuestionParticle)
      throw ValidationError("bad suffix descriptor '" + std::string(s) + "'");
    t.tags.push_back(*tag);
  }
  return t;
}

inline std::string suffix_descriptor(const std::optional<SuffixTrigger>& t) {
  if (!t) return "-";
  if (t->question_particle) return "QuestionParticle";
  return morph::tags_to_string(t->tags, "+");
}

class Catalog {
 public:
  void add(PatternRule rule) {
    if (!valid_code(rule.code)) throw ValidationError("pattern code '" + rule.code + "' does not match NI_[A-Z_]+");
    if (contains(rule.code)) throw ValidationError("duplicate pattern code '" + rule.code + "'");
    for (auto& r : rule.trigger_roots) r = text::to_lower(r);
    std::erase_if(rule.trigger_roots, [](const std::string& r) { return r.empty(); });
    std::sort(rule.trigger_roots.begin(), rule.trigger_roots.end());
    rule.trigger_roots.erase(std::unique(rule.trigger_roots.begin(), rule.trigger_roots.end()),
                             rule.trigger_roots.end());
    if (!rule.requires_root() && !rule.requires_suffix())
      throw ValidationError("pattern '" + rule.code + "' has neither trigger roots nor a suffix trigger");
    rules_.push_back(std::move(rule));
  }

  const std::vector<PatternRule>& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }

  bool contains(std::string_view code) const {
    return std::any_of(rules_.begin(), rules_.end(), [&](const PatternRule& r) { return r.code == code; });
  }

  std::vector<std::string> codes() const {
    std::vector<std::string> out;
    for (const auto& r : rules_) out.push_back(r.code);
    return out;
  }

  /// Format: `code<TAB>root1,root2,...<TAB>suffix-descriptor<TAB>scope`,
  /// with "-" for an empty roots or suffix column.
  static Catalog parse(std::string_view content, const std::string& source = "catalog") {
    Catalog cat;
    std::size_t lineno = 0;
    for (const auto& line : morph::Lexicon::split_lines(content)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      const auto f = morph::Lexicon::split(line, '\t');
      if (f.size() != 4) throw LoadError(source, lineno, "expected code<TAB>roots<TAB>suffix<TAB>scope");
      try {
        PatternRule r;
        r.code = f[0];
        if (f[1] != "-") r.trigger_roots = morph::Lexicon::split(f[1], ',');
        r.trigger_suffix = parse_suffix_descriptor(f[2]);
        if (f[3] == "Sentence") r.scope = Scope::Sentence;
        else if (f[3] == "Document") r.scope = Scope::Document;
        else throw ValidationError("unknown scope '" + f[3] + "'");
        cat.add(std::move(r));
      } catch (const ValidationError& e) {
        throw LoadError(source, lineno, e.what());
      }
    }
    return cat;
  }

  static Catalog load(const std::string& path) { return parse(morph::Lexicon::read_file(path), path); }

  /// Inverse of parse for catalogs without comments.
  std::string serialize() const {
    std::string out;
    for (const auto& r : rules_) {
      out += r.code + '\t';
      if (r.trigger_roots.empty()) {
        out += '-';
      } else {
        for (std::size_t i = 0; i < r.trigger_roots.size(); ++i) out += (i ? "," : "") + r.trigger_roots[i];
      }
      out += '\t' + suffix_descriptor(r.trigger_suffix) + '\t';
      out += r.scope == Scope::Sentence ? "Sentence" : "Document";
      out += '\n';
    }
    return out;
  }

 private:
  std::vector<PatternRule> rules_;
};

/// mı/mi/mu/mü alone or followed only by person or copular endings
/// (miyiz, mısın, mıydı, mudur ...).
inline bool is_question_particle(std::string_view token) {
  const std::u32string t = text::decode(token);
  if (t.size() < 2 || t[0] != U'm') return false;
  const char32_t v = t[1];
  if (v != U'ı' && v != U'i' && v != U'u' && v != U'ü') return false;
  const std::u32string rest = t.substr(2);
  const std::u32string V(1, v);
  const char32_t a = text::is_front_vowel(v) ? U'e' : U'a';
  static const std::u32string empty;
  const std::u32string endings[] = {
      empty,
      U"y" + V + U"m",
      U"s" + V + U"n",
      U"y" + V + U"z",
      U"s" + V + U"n" + V + U"z",
      U"d" + V + U"r",
      U"d" + V + U"rl" + std::u32string(1, a) + U"r",
      U"l" + std::u32string(1, a) + U"r",
      U"yd" + V,
      U"yd" + V + U"m",
      U"yd" + V + U"n",
      U"yd" + V + U"k",
      U"yd" + V + U"n" + V + U"z",
      U"ym" + V + U"ş",
  };
  return std::find(std::begin(endings), std::end(endings), rest) != std::end(endings);
}

namespace detail {

inline bool contains_run(const std::vector<morph::Tag>& tags, const std::vector<morph::Tag>& run) {
  if (run.empty()) return false;
  return std::search(tags.begin(), tags.end(), run.begin(), run.end()) != tags.end();
}

/// A particle counts as a yes/no question marker unless its host word is a
/// known nominal (noun, adjective, adverb): "mümkün mü" asks about a
/// possibility, not an action.
inline bool verbal_host(const std::optional<morph::MorphAnalysis>& host) {
  return !host || host->pos == morph::Pos::Verb;
}

struct TokenInfo {
  std::string token;
  std::optional<morph::MorphAnalysis> best;
};

inline std::vector<Evidence> rule_evidence(const PatternRule& rule, const std::vector<TokenInfo>& tokens,
                                           std::size_t offset) {
  std::vector<Evidence> ev;
  // Literal word matches stand in for roots only when the rule has no
  // suffix condition (neden, mümkün, sehven).
  const bool literal_ok = !rule.requires_suffix();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& ti = tokens[i];
    if (rule.requires_root()) {
      const bool by_root = ti.best && rule.has_root(ti.best->root);
      const bool by_word = literal_ok && rule.has_root(ti.token);
      if (by_root || by_word) ev.push_back({offset + i, Reason::RootHit});
    }
    if (rule.requires_suffix()) {
      const auto& s = *rule.trigger_suffix;
      if (s.question_particle) {
        if (is_question_particle(ti.token) && (i == 0 || verbal_host(tokens[i - 1].best)))
          ev.push_back({offset + i, Reason::ParticleHit});
      } else if (ti.best && contains_run(ti.best->tags, s.tags)) {
        ev.push_back({offset + i, Reason::SuffixHit});
      }
    }
  }
  return ev;
}

inline bool fires(const PatternRule& rule, const std::vector<Evidence>& ev) {
  bool root = false, suffix = false;
  for (const auto& e : ev) {
    if (e.reason == Reason::RootHit) root = true;
    else suffix = true;
  }
  return (!rule.requires_root() || root) && (!rule.requires_suffix() || suffix);
}

}  // namespace detail

/// Applies every rule to every sentence. A sentence-scoped rule fires when
/// all of its trigger kinds occur in that sentence; a document-scoped rule
/// when they occur anywhere, reported at the first sentence with evidence.
/// Evidence token indices are sentence-relative for sentence scope and
/// document-relative for document scope.
inline std::vector<PatternMatch> match_patterns(std::string_view report_text, const Catalog& catalog,
                                                const morph::Analyzer& analyzer) {
  std::vector<PatternMatch> out;
  if (catalog.empty()) return out;
  const auto sentences = features::tokenized_sentences(report_text);

  std::vector<std::vector<detail::TokenInfo>> info;
  info.reserve(sentences.size());
  std::map<std::string, std::optional<morph::MorphAnalysis>> memo;
  for (const auto& s : sentences) {
    std::vector<detail::TokenInfo> row;
    for (const auto& tok : s) {
      auto it = memo.find(tok);
      if (it == memo.end()) it = memo.emplace(tok, analyzer.best(tok)).first;
      row.push_back({tok, it->second});
    }
    info.push_back(std::move(row));
  }

  for (const auto& rule : catalog.rules()) {
    if (rule.scope == Scope::Sentence) {
      for (std::size_t si = 0; si < info.size(); ++si) {
        auto ev = detail::rule_evidence(rule, info[si], 0);
        if (detail::fires(rule, ev)) out.push_back({rule.code, si, std::move(ev)});
      }
    } else {
      std::vector<Evidence> all;
      std::optional<std::size_t> first;
      std::size_t offset = 0;
      for (std::size_t si = 0; si < info.size(); ++si) {
        auto ev = detail::rule_evidence(rule, info[si], offset);
        if (!ev.empty() && !first) first = si;
        all.insert(all.end(), ev.begin(), ev.end());
        offset += info[si].size();
      }
      if (first && detail::fires(rule, all)) out.push_back({rule.code, *first, std::move(all)});
    }
  }

  std::sort(out.begin(), out.end(), [](const PatternMatch& a, const PatternMatch& b) {
    return a.sentence_index != b.sentence_index ? a.sentence_index < b.sentence_index : a.code < b.code;
  });
  return out;
}

}  // namespace triage::patterns
