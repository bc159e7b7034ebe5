#pragma once

// The three extractors (n-grams, morphological analysis, patterns) and
// their composition into one namespaced feature bag.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "triage/error.hpp"
#include "triage/morphology.hpp"
#include "triage/patterns.hpp"
#include "triage/tokenizer.hpp"

namespace triage::features {

enum class Extractor : std::uint8_t { NGrams = 1, MA = 2, Patterns = 4 };

/// Non-empty subset of the three extractors.
class ExtractorSet {
 public:
  constexpr ExtractorSet() = default;
  constexpr ExtractorSet(std::initializer_list<Extractor> xs) {
    for (auto x : xs) bits_ |= static_cast<std::uint8_t>(x);
  }

  static constexpr ExtractorSet all() { return {Extractor::NGrams, Extractor::MA, Extractor::Patterns}; }

  constexpr bool has(Extractor x) const { return bits_ & static_cast<std::uint8_t>(x); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr ExtractorSet operator|(ExtractorSet o) const {
    ExtractorSet s;
    s.bits_ = bits_ | o.bits_;
    return s;
  }
  constexpr bool contains(ExtractorSet o) const { return (bits_ & o.bits_) == o.bits_; }
  constexpr bool operator==(const ExtractorSet&) const = default;

  /// "n-grams + ma + patterns" style label.
  std::string label() const {
    std::string out;
    auto add = [&](std::string_view s) {
      if (!out.empty()) out += " + ";
      out += s;
    };
    if (has(Extractor::NGrams)) add("n-grams");
    if (has(Extractor::MA)) add("ma");
    if (has(Extractor::Patterns)) add("patterns");
    return out;
  }

  /// Accepts labels ("n-grams + ma") and comma lists ("ngrams,ma").
  static ExtractorSet parse(std::string_view s) {
    ExtractorSet set;
    std::string word;
    auto flush = [&] {
      if (word.empty()) return;
      if (word == "ngrams" || word == "n-grams" || word == "ngram") set.bits_ |= 1;
      else if (word == "ma") set.bits_ |= 2;
      else if (word == "patterns" || word == "pattern") set.bits_ |= 4;
      else if (word == "all") set.bits_ |= 7;
      else throw ValidationError("unknown extractor '" + word + "'");
      word.clear();
    };
    for (char c : s) {
      if (c == '+' || c == ',' || c == ' ') flush();
      else word.push_back(c);
    }
    flush();
    if (set.empty()) throw ValidationError("empty extractor set");
    return set;
  }

  /// The seven non-empty subsets, in the row order of the ablation table.
  static std::vector<ExtractorSet> ablation_order() {
    using E = Extractor;
    return {{E::NGrams},           {E::MA},
            {E::Patterns},         {E::NGrams, E::MA},
            {E::NGrams, E::Patterns}, {E::MA, E::Patterns},
            {E::NGrams, E::MA, E::Patterns}};
  }

 private:
  std::uint8_t bits_ = 0;
};

struct ExtractorConfig {
  int ngram_min = 1;
  int ngram_max = 2;
  std::set<std::string> stopwords;
  bool drop_digit_tokens = false;
  ExtractorSet enabled = ExtractorSet::all();

  void validate() const {
    if (ngram_min < 1 || ngram_max < ngram_min)
      throw ValidationError("n-gram range must satisfy 1 <= min <= max");
    if (enabled.empty()) throw ValidationError("no extractor enabled");
  }
};

/// Multiset of feature tokens, each prefixed ng:, ma: or pat:.
class FeatureBag {
 public:
  using Map = std::map<std::string, std::uint32_t>;

  void add(const std::string& key, std::uint32_t n = 1) {
    if (n) counts_[key] += n;
  }
  void merge(const FeatureBag& o) {
    for (const auto& [k, v] : o.counts_) counts_[k] += v;
  }
  std::uint32_t count(const std::string& key) const {
    auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
  }
  bool contains(const std::string& key) const { return counts_.count(key) != 0; }
  const Map& counts() const noexcept { return counts_; }
  std::size_t size() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return counts_.empty(); }

  friend bool operator==(const FeatureBag&, const FeatureBag&) = default;

 private:
  Map counts_;
};

inline std::set<std::string> parse_stopwords(std::string_view content) {
  std::set<std::string> out;
  for (auto& line : morph::Lexicon::split_lines(content)) {
    const auto toks = tokenize(line);
    out.insert(toks.begin(), toks.end());
  }
  return out;
}

inline std::set<std::string> load_stopwords(const std::string& path) {
  return parse_stopwords(morph::Lexicon::read_file(path));
}

inline FeatureBag extract_ngrams(std::string_view input, const ExtractorConfig& config) {
  config.validate();
  std::vector<std::string> kept;
  for (auto& t : tokenize(input)) {
    if (config.stopwords.count(t)) continue;
    if (config.drop_digit_tokens && std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }))
      continue;
    kept.push_back(std::move(t));
  }

  FeatureBag bag;
  for (int n = config.ngram_min; n <= config.ngram_max; ++n) {
    const auto len = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + len <= kept.size(); ++i) {
      std::string key = "ng:" + kept[i];
      for (std::size_t j = 1; j < len; ++j) key += ' ' + kept[i + j];
      bag.add(key);
    }
  }
  return bag;
}

/// Roots and semantic suffix tags of every detected verb.
inline FeatureBag extract_ma(std::string_view input, const morph::Analyzer& analyzer) {
  FeatureBag bag;
  for (const auto& [idx, a] : analyzer.detect_verbs(tokenize(input))) {
    bag.add("ma:root=" + a.root);
    for (auto tag : a.tags) bag.add("ma:" + std::string(morph::to_string(tag)));
  }
  return bag;
}

/// One pat:<code> count per matching sentence.
inline FeatureBag extract_patterns(std::string_view input, const patterns::Catalog& catalog,
                                   const morph::Analyzer& analyzer) {
  FeatureBag bag;
  for (const auto& m : patterns::match_patterns(input, catalog, analyzer)) bag.add("pat:" + m.code);
  return bag;
}

/// Analyzer and catalog shared by the ma and patterns extractors.
struct Handles {
  const morph::Analyzer& analyzer;
  const patterns::Catalog& catalog;
};

/// Per-extractor bags of one text; composing a subset is a key-wise merge.
struct ExtractedParts {
  FeatureBag ngrams;
  FeatureBag ma;
  FeatureBag patterns;

  FeatureBag compose(ExtractorSet enabled) const {
    FeatureBag bag;
    if (enabled.has(Extractor::NGrams)) bag.merge(ngrams);
    if (enabled.has(Extractor::MA)) bag.merge(ma);
    if (enabled.has(Extractor::Patterns)) bag.merge(patterns);
    return bag;
  }
};

inline ExtractedParts extract_parts(std::string_view input, const ExtractorConfig& config, const Handles& h,
                                    ExtractorSet which = ExtractorSet::all()) {
  ExtractedParts p;
  if (which.has(Extractor::NGrams)) p.ngrams = extract_ngrams(input, config);
  if (which.has(Extractor::MA)) p.ma = extract_ma(input, h.analyzer);
  if (which.has(Extractor::Patterns)) p.patterns = extract_patterns(input, h.catalog, h.analyzer);
  return p;
}

inline FeatureBag compose(std::string_view input, const ExtractorConfig& config, const Handles& h) {
  config.validate();
  return extract_parts(input, config, h, config.enabled).compose(config.enabled);
}

}  // namespace triage::features
