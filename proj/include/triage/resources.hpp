#pragma once

// Shipped data files: lexicon, suffix table, pattern catalog, stopwords.

#include <cstdlib>
#include <set>
#include <string>

#include "triage/features.hpp"
#include "triage/morphology.hpp"
#include "triage/patterns.hpp"

#ifndef TRIAGE_DEFAULT_DATA_DIR
#define TRIAGE_DEFAULT_DATA_DIR "data"
#endif

namespace triage {

/// $TRIAGE_DATA_DIR if set, else the source tree's data/ directory.
inline std::string data_dir() {
  if (const char* env = std::getenv("TRIAGE_DATA_DIR"); env && *env) return env;
  return TRIAGE_DEFAULT_DATA_DIR;
}

/// Everything the extractors need, loaded once and then read-only.
struct Resources {
  morph::Analyzer analyzer;
  patterns::Catalog catalog;
  std::set<std::string> stopwords;

  static Resources load(const std::string& dir = data_dir()) {
    return Resources{
        morph::Analyzer(morph::Lexicon::load(dir + "/lexicon.tsv"), morph::SuffixRules::load(dir + "/suffixes.tsv")),
        patterns::Catalog::load(dir + "/catalog.tsv"),
        features::load_stopwords(dir + "/stopwords.txt"),
    };
  }

  features::Handles handles() const { return {analyzer, catalog}; }

  features::ExtractorConfig config(features::ExtractorSet enabled = features::ExtractorSet::all()) const {
    features::ExtractorConfig c;
    c.stopwords = stopwords;
    c.enabled = enabled;
    return c;
  }
};

}  // namespace triage
