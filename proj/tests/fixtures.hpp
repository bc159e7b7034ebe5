#pragma once

// Inputs shared by the unit suites and the acceptance run.

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "triage/morphology.hpp"
#include "triage/vector_model.hpp"

namespace fixtures {

/// Ten roots covering verbs, nouns, an adjective, a softening root and a
/// harmony exception.
inline triage::morph::Lexicon oracle_lexicon() {
  return triage::morph::Lexicon::parse(
      "bul\tVerb\t10\n"
      "çalış\tVerb\t10\n"
      "seç\tVerb\t10\n"
      "sil\tVerb\t10\n"
      "kaldır\tVerb\t10\n"
      "güncelle\tVerb\t10\n"
      "arşiv\tNoun\t5\n"
      "hesap\tNoun\t5\tsoften\n"
      "saat\tNoun\t5\tfront\n"
      "mümkün\tAdjective\t5\n");
}

/// One example sentence per catalog rule, with the code it must fire.
inline const std::vector<std::pair<std::string, std::string>>& rule_examples() {
  static const std::vector<std::pair<std::string, std::string>> v{
      {"Başvurunun arşive kaldırılmasını rica ederiz.", "NI_REQUEST"},
      {"... poliçe numarasını öğrenebilir miyiz?", "NI_YESNO_QUESTION"},
      {"Neden hayat sigortası polisinin iptal edildiği ...", "NI_WHY_QUESTION"},
      {"... mümkün mü?", "NI_POSSIBLE"},
      {"Sehven yaratılmıştır.", "NI_INADVERTENTLY"},
  };
  return v;
}

/// Genuine defect reports built on negative and obligative verb forms.
inline const std::vector<std::string>& issue_sentences() {
  static const std::vector<std::string> v{
      "Ekran açılamadı.",
      "Müşteri kaydı bulunamadı.",
      "Kart limiti güncellenemedi.",
      "Hesap hareketleri rapora gelmedi.",
      "Ödeme ekranı açılmadı ve işlem tamamlanamadı.",
      "Onay butonu ekranda gösterilmeli.",
      "Faiz tutarı doğru hesaplanmalı.",
      "Rapor dün oluşturulmalıydı.",
      "Taksit bilgileri sisteme aktarılamadı.",
      "Havale dekontu müşteriye gönderilmedi.",
  };
  return v;
}

/// Five hand-written feature documents for the tf-idf comparison.
inline const std::vector<std::map<std::string, int>>& tfidf_documents() {
  static const std::vector<std::map<std::string, int>> v{
      {{"ng:kart", 2}, {"ng:limit", 1}, {"pat:NI_REQUEST", 1}},
      {{"ng:kart", 1}, {"ma:Negative", 3}},
      {{"ng:hesap", 1}, {"ng:limit", 1}, {"ma:root=sil", 1}},
      {{"pat:NI_REQUEST", 2}, {"ng:hesap", 4}, {"ng:kart", 1}},
      {{"ma:Negative", 1}, {"ng:ekran", 1}},
  };
  return v;
}

struct Dataset {
  std::vector<triage::model::SparseVector> X;
  std::vector<triage::Verdict> y;
};

/// 2-D points at least 0.5 away from the line a + 0.5b = 0.4, so the
/// intercept matters.
inline Dataset separable_2d(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Dataset d;
  while (d.X.size() < n) {
    const double a = u(rng), b = u(rng);
    const double s = a + 0.5 * b - 0.4;
    if (std::abs(s) < 0.5) continue;
    triage::model::SparseVector x;
    x.entries = {{0, a}, {1, b}};
    d.X.push_back(x);
    d.y.push_back(s > 0 ? triage::Verdict::NonIssue : triage::Verdict::Issue);
  }
  return d;
}

}  // namespace fixtures
