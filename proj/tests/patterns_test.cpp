#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "test_support.hpp"
#include "triage/patterns.hpp"

using namespace triage;
using namespace triage::patterns;

namespace {

std::vector<std::string> codes(std::string_view text, const Catalog& cat) {
  std::vector<std::string> out;
  for (const auto& m : match_patterns(text, cat, testing_support::resources().analyzer)) out.push_back(m.code);
  return out;
}

std::vector<std::string> codes(std::string_view text) { return codes(text, testing_support::resources().catalog); }

using Codes = std::vector<std::string>;

}  // namespace

TEST(Catalog, DefaultHasTheFiveRules) {
  const auto& cat = testing_support::resources().catalog;
  EXPECT_EQ(cat.codes(),
            (Codes{"NI_REQUEST", "NI_YESNO_QUESTION", "NI_WHY_QUESTION", "NI_POSSIBLE", "NI_INADVERTENTLY"}));
  const auto& req = cat.rules()[0];
  EXPECT_EQ(req.trigger_roots, (Codes{"arşiv", "güncel", "sil"}));
  ASSERT_TRUE(req.trigger_suffix);
  EXPECT_EQ(req.trigger_suffix->tags, (std::vector{morph::Tag::VerbalNoun, morph::Tag::Possessive3sg}));
  EXPECT_TRUE(cat.rules()[1].trigger_suffix->question_particle);
  EXPECT_TRUE(cat.rules()[1].trigger_roots.empty());
}

TEST(Catalog, ShippedFileIsGolden) {
  std::ifstream in(triage::data_dir() + "/catalog.tsv", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(),
            "NI_REQUEST\tarşiv,güncel,sil\tVerbalNoun+Possessive3sg\tSentence\n"
            "NI_YESNO_QUESTION\t-\tQuestionParticle\tSentence\n"
            "NI_WHY_QUESTION\tneden\t-\tSentence\n"
            "NI_POSSIBLE\tmümkün\t-\tSentence\n"
            "NI_INADVERTENTLY\tsehven\t-\tSentence\n");
  EXPECT_EQ(testing_support::resources().catalog.serialize(), ss.str());
}

TEST(Catalog, EmptyDocument) {
  EXPECT_TRUE(Catalog::parse("").empty());
  EXPECT_TRUE(Catalog::parse("# only a comment\n\n").empty());
}

TEST(Catalog, LoadErrorsCarryLine) {
  auto line_of = [](std::string_view doc) -> std::size_t {
    try {
      Catalog::parse(doc, "t.tsv");
    } catch (const LoadError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("NI_A\ta\t-\tSentence\nNI_A\tb\t-\tSentence\n"), 2u);
  EXPECT_EQ(line_of("NI_A\t-\t-\tSentence\n"), 1u);
  EXPECT_EQ(line_of("NI_A\ta\t-\n"), 1u);
  EXPECT_EQ(line_of("ni_lower\ta\t-\tSentence\n"), 1u);
  EXPECT_EQ(line_of("NI_A\ta\tBogus+Tag\tSentence\n"), 1u);
  EXPECT_EQ(line_of("NI_A\ta\t-\tParagraph\n"), 1u);
  EXPECT_EQ(line_of("# c\nNI_A\ta\t-\tSentence\n\nNI_B\t-\t-\tSentence\n"), 4u);
}

TEST(Catalog, SerializeRoundTrips) {
  const std::string doc = "NI_X\tb,a\tVerbalNoun\tDocument\nNI_Y\t-\tQuestionParticle\tSentence\n";
  const auto cat = Catalog::parse(doc);
  EXPECT_EQ(cat.serialize(), "NI_X\ta,b\tVerbalNoun\tDocument\nNI_Y\t-\tQuestionParticle\tSentence\n");
  EXPECT_EQ(Catalog::parse(cat.serialize()).rules(), cat.rules());
}

TEST(Match, TableExamplesFireExactlyTheirOwnCode) {
  for (const auto& [sentence, code] : fixtures::rule_examples()) EXPECT_EQ(codes(sentence), Codes{code}) << sentence;
}

TEST(Match, ValidIssueSentencesFireNothing) {
  for (const auto& s : fixtures::issue_sentences()) EXPECT_EQ(codes(s), Codes{}) << s;
}

TEST(Match, RequestEvidence) {
  const auto m = match_patterns("Başvurunun arşive kaldırılmasını rica ederiz.", testing_support::resources().catalog,
                                testing_support::resources().analyzer);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].sentence_index, 0u);
  EXPECT_EQ(m[0].evidence, (std::vector<Evidence>{{1, Reason::RootHit}, {2, Reason::SuffixHit}}));
}

TEST(Match, SentenceIndicesAndOrder) {
  const auto m = match_patterns("Ekran açılamadı. Sehven yaratılmıştır!\nNeden? Kaydın silinmesi mümkün mü?",
                                testing_support::resources().catalog, testing_support::resources().analyzer);
  std::vector<std::pair<std::size_t, std::string>> got;
  for (const auto& x : m) got.emplace_back(x.sentence_index, x.code);
  EXPECT_EQ(got, (std::vector<std::pair<std::size_t, std::string>>{
                     {1, "NI_INADVERTENTLY"}, {2, "NI_WHY_QUESTION"}, {3, "NI_POSSIBLE"}, {3, "NI_REQUEST"}}));
}

TEST(Match, EmptyAndTokenlessText) {
  EXPECT_TRUE(codes("").empty());
  EXPECT_TRUE(codes("...?!\n").empty());
}

TEST(Match, QuestionParticleForms) {
  for (const char* w : {"mı", "mi", "mu", "mü", "miyiz", "mısınız", "mıydı", "mudur"})
    EXPECT_TRUE(is_question_particle(w)) << w;
  for (const char* w : {"m", "ma", "mim", "mısa", "mümkün", "miktar"}) EXPECT_FALSE(is_question_particle(w)) << w;
  EXPECT_EQ(codes("Kart kapatıldı mı?"), Codes{"NI_YESNO_QUESTION"});
  EXPECT_EQ(codes("Xyzabc mı?"), Codes{"NI_YESNO_QUESTION"});
}

TEST(Match, CoOccurrenceRequired) {
  EXPECT_TRUE(codes("Başvuru arşive gönderildi.").empty());
  EXPECT_TRUE(codes("Kartın kapatılmasını rica ederiz.").empty());
  // root and suffix in different sentences
  EXPECT_TRUE(codes("Arşiv ekranı. Kartın kapatılmasını rica ederiz.").empty());
  EXPECT_EQ(codes("Adresin güncel olmasını rica ederiz."), Codes{"NI_REQUEST"});
  EXPECT_EQ(codes("Kaydın güncellenmesini rica ederiz."), Codes{});
  EXPECT_EQ(codes("Kaydın silinmesini rica ederiz."), Codes{"NI_REQUEST"});
}

TEST(Match, DocumentScopeSpansSentences) {
  const auto cat = Catalog::parse("NI_SPAN\tarşiv\tVerbalNoun+Possessive3sg\tDocument\n");
  const auto m = match_patterns("Ekran açıldı. Arşiv ekranı. Kartın kapatılmasını rica ederiz.", cat,
                                testing_support::resources().analyzer);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].sentence_index, 1u);
  EXPECT_EQ(m[0].evidence, (std::vector<Evidence>{{2, Reason::RootHit}, {5, Reason::SuffixHit}}));
}

namespace {

const std::vector<std::string> kCorpus{
    "Başvurunun arşive kaldırılmasını rica ederiz. Sehven yaratılmıştır.",
    "Neden hayat sigortası iptal edildi? Poliçe numarasını öğrenebilir miyiz?",
    "Kaydın silinmesi mümkün mü? Ekran açılamadı.",
    "Kart limiti güncellenemedi. Müşterinin bilgisi güncel değil mi?",
    "Adresin güncellenmesini rica ederiz. Neden? Sehven girildi.",
    "Faiz tutarı doğru hesaplanmalı. Ödeme alınamadı mı?",
};

std::vector<std::string> split_keep(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    cur.push_back(c);
    if (c == '.' || c == '?' || c == '!') {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

TEST(MatchProperty, SentenceLocality) {
  const auto& cat = testing_support::resources().catalog;
  const auto& an = testing_support::resources().analyzer;
  for (const auto& doc : kCorpus) {
    const auto parts = split_keep(doc);
    const auto full = match_patterns(doc, cat, an);
    for (std::size_t drop = 0; drop < parts.size(); ++drop) {
      std::string rest;
      std::vector<std::size_t> original;  // kept sentence index -> original index
      for (std::size_t i = 0; i < parts.size(); ++i)
        if (i != drop) {
          rest += parts[i];
          original.push_back(i);
        }
      for (const auto& m : match_patterns(rest, cat, an)) {
        const bool existed = std::any_of(full.begin(), full.end(), [&](const PatternMatch& f) {
          return f.code == m.code && f.sentence_index == original[m.sentence_index];
        });
        EXPECT_TRUE(existed) << doc << " / dropped " << drop << " / " << m.code;
      }
    }
  }
}

TEST(MatchProperty, CatalogMonotonicity) {
  const auto& full = testing_support::resources().catalog;
  const auto& an = testing_support::resources().analyzer;
  // every prefix of the rule list, and every single rule, yields a subset of
  // the full catalog's matches
  for (const auto& doc : kCorpus) {
    const auto all = match_patterns(doc, full, an);
    for (std::size_t n = 0; n <= full.size(); ++n) {
      Catalog sub;
      for (std::size_t i = 0; i < n; ++i) sub.add(full.rules()[i]);
      for (const auto& m : match_patterns(doc, sub, an))
        EXPECT_NE(std::find(all.begin(), all.end(), m), all.end()) << doc << " " << m.code;
    }
    for (const auto& r : full.rules()) {
      Catalog one;
      one.add(r);
      for (const auto& m : match_patterns(doc, one, an))
        EXPECT_NE(std::find(all.begin(), all.end(), m), all.end()) << doc << " " << m.code;
    }
  }
}

TEST(MatchProperty, Deterministic) {
  const auto& r = testing_support::resources();
  for (const auto& doc : kCorpus) EXPECT_EQ(match_patterns(doc, r.catalog, r.analyzer), match_patterns(doc, r.catalog, r.analyzer));
}
