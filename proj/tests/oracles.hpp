#pragma once

// Test-only reference implementations. They share no code path with the
// library beyond its plain data types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "triage/morphology.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Morphology: forward generation of every root x suffix-sequence surface.

using triage::morph::Pos;
using triage::morph::Tag;

struct GeneratedForm {
  std::string word;
  triage::morph::MorphAnalysis analysis;
};

inline bool vowel(char32_t c) { return std::u32string_view(U"aeıioöuüâîû").find(c) != std::u32string_view::npos; }
inline bool front(char32_t c) { return std::u32string_view(U"eiöüî").find(c) != std::u32string_view::npos; }
inline bool rounded(char32_t c) { return std::u32string_view(U"oöuüû").find(c) != std::u32string_view::npos; }
inline bool hard(char32_t c) { return std::u32string_view(U"fstkçşhp").find(c) != std::u32string_view::npos; }

/// Suffix surface after `stem`, written from the harmony tables directly.
inline std::u32string realize(const std::u32string& archetype, std::u32string stem, triage::morph::Harmony h) {
  std::u32string buffer, body = archetype;
  if (archetype[0] == U'(') {
    auto close = archetype.find(U')');
    buffer = archetype.substr(1, close - 1);
    body = archetype.substr(close + 1);
  }
  bool anchor_from_root = true;
  auto last_vowel = [&] {
    for (auto it = stem.rbegin(); it != stem.rend(); ++it)
      if (vowel(*it)) return *it;
    return U'\0';
  };
  auto step = [&](char32_t sym) {
    const char32_t lv = last_vowel();
    bool f = front(lv), r = rounded(lv);
    if (anchor_from_root && h == triage::morph::Harmony::Front) f = true;
    if (anchor_from_root && h == triage::morph::Harmony::Back) f = false;
    char32_t out = sym;
    if (sym == U'A') out = f ? U'e' : U'a';
    if (sym == U'I') out = f ? (r ? U'ü' : U'i') : (r ? U'u' : U'ı');
    if (sym == U'D') out = hard(stem.back()) ? U't' : U'd';
    if (vowel(out)) anchor_from_root = false;
    stem.push_back(out);
    return out;
  };
  std::u32string result;
  if (!buffer.empty()) {
    const bool vb = buffer[0] == U'A' || buffer[0] == U'I' || vowel(buffer[0]);
    const bool ends_vowel = vowel(stem.back());
    if ((vb && !ends_vowel) || (!vb && ends_vowel))
      for (char32_t c : buffer) result.push_back(step(c));
  }
  for (char32_t c : body) result.push_back(step(c));
  return result;
}

/// Which tags may follow, given the root class and the previous tag.
inline bool allowed(Pos root_pos, const std::vector<Tag>& so_far, Tag next) {
  const bool nominalized =
      std::find(so_far.begin(), so_far.end(), Tag::VerbalNoun) != so_far.end() ||
      root_pos == Pos::Noun || root_pos == Pos::Adjective;
  const bool verbal = root_pos == Pos::Verb && !nominalized;
  const bool closed = root_pos == Pos::Adverb || root_pos == Pos::Other;
  if (closed) return false;
  const Tag* prev = so_far.empty() ? nullptr : &so_far.back();
  static const std::set<Tag> verb_only{Tag::Passive,    Tag::Causative,  Tag::Ability,   Tag::Negative,
                                       Tag::PastTense,  Tag::Obligative, Tag::VerbalNoun};
  if (verb_only.count(next)) return verbal;
  if (next == Tag::Possessive3sg || next == Tag::CaseMarker) return nominalized;
  if (next == Tag::CopularPast) return nominalized || (verbal && prev && *prev == Tag::Obligative);
  if (next == Tag::FirstPersonPlural) return prev && (*prev == Tag::PastTense || *prev == Tag::CopularPast);
  return false;
}

inline std::u32string soften_final(std::u32string s) {
  char32_t& c = s.back();
  const char32_t b = s[s.size() - 2];
  if (c == U'p') c = U'b';
  else if (c == U'ç') c = U'c';
  else if (c == U't') c = U'd';
  else if (c == U'k') c = b == U'n' ? U'g' : U'ğ';
  return s;
}

/// Every form reachable with at most `max_suffixes` suffixes.
inline std::vector<GeneratedForm> generate(const triage::morph::Lexicon& lexicon,
                                           const std::vector<triage::morph::SuffixRule>& rules,
                                           std::size_t max_suffixes) {
  using triage::text::decode;
  using triage::text::encode;
  std::vector<GeneratedForm> out;
  for (const auto& e : lexicon.entries()) {
    const std::u32string root = decode(e.root);
    std::vector<std::size_t> seq;
    // depth-first over rule index sequences
    auto emit = [&](const std::vector<std::size_t>& rs) {
      std::vector<Tag> tags;
      int last_slot = -1000000;
      for (auto i : rs) {
        if (rules[i].slot < last_slot || !allowed(e.pos, tags, rules[i].tag)) return;
        last_slot = rules[i].slot;
        tags.push_back(rules[i].tag);
      }
      std::u32string stem = root;
      std::vector<std::u32string> segs{root};
      for (std::size_t k = 0; k < rs.size(); ++k) {
        bool vowel_free_so_far = true;
        for (std::size_t j = 1; j < segs.size(); ++j)
          for (char32_t c : segs[j]) vowel_free_so_far = vowel_free_so_far && !vowel(c);
        const auto surf = realize(decode(rules[rs[k]].archetype), stem,
                                  vowel_free_so_far ? e.harmony : triage::morph::Harmony::Regular);
        if (surf.empty()) return;
        if (k == 0 && e.softens && vowel(surf[0]) && root.size() >= 2 &&
            std::u32string_view(U"pçtk").find(root.back()) != std::u32string_view::npos) {
          segs[0] = soften_final(root);
          stem = segs[0];
        }
        segs.push_back(surf);
        stem += surf;
      }
      GeneratedForm g;
      for (const auto& s : segs) g.word += encode(s);
      g.analysis.root = e.root;
      g.analysis.pos = e.pos;
      g.analysis.tags = tags;
      if (!tags.empty() && (tags.back() == Tag::PastTense || tags.back() == Tag::Obligative ||
                            tags.back() == Tag::CopularPast))
        g.analysis.tags.push_back(Tag::ThirdPersonSingular);
      for (const auto& s : segs) g.analysis.segmentation.push_back(encode(s));
      out.push_back(std::move(g));
    };
    std::function<void(std::vector<std::size_t>&)> rec = [&](std::vector<std::size_t>& rs) {
      emit(rs);
      if (rs.size() == max_suffixes) return;
      for (std::size_t i = 0; i < rules.size(); ++i) {
        rs.push_back(i);
        rec(rs);
        rs.pop_back();
      }
    };
    rec(seq);
  }
  return out;
}

inline auto key(const triage::morph::MorphAnalysis& a) {
  std::vector<int> t;
  for (auto x : a.tags) t.push_back(static_cast<int>(x));
  return std::make_tuple(a.root, static_cast<int>(a.pos), t, a.segmentation);
}

// ---------------------------------------------------------------------------
// tf-idf: dense matrix, computed straight from the formulas.

inline std::vector<std::vector<double>> dense_tfidf(const std::vector<std::map<std::string, int>>& docs,
                                                    std::vector<std::string>& terms_out) {
  std::set<std::string> terms;
  for (const auto& d : docs)
    for (const auto& [t, c] : d) terms.insert(t);
  terms_out.assign(terms.begin(), terms.end());
  const double n = static_cast<double>(docs.size());
  std::vector<std::vector<double>> m(docs.size(), std::vector<double>(terms_out.size(), 0.0));
  for (std::size_t j = 0; j < terms_out.size(); ++j) {
    double df = 0;
    for (const auto& d : docs) df += d.count(terms_out[j]) ? 1 : 0;
    const double idf = std::log((1.0 + n) / (1.0 + df)) + 1.0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      auto it = docs[i].find(terms_out[j]);
      m[i][j] = it == docs[i].end() ? 0.0 : it->second * idf;
    }
  }
  for (auto& row : m) {
    double norm = 0;
    for (double v : row) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0)
      for (double& v : row) v /= norm;
  }
  return m;
}

}  // namespace oracle
