#pragma once

// A trained pipeline (extractor settings, vocabulary, linear model) and its
// on-disk text format.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "triage/error.hpp"
#include "triage/features.hpp"
#include "triage/vector_model.hpp"

namespace triage {

struct FittedModel {
  model::Vocabulary vocabulary;
  model::LinearModel model;
};

/// Vocabulary from `bags` only, then the linear model on their vectors.
inline FittedModel fit(const std::vector<features::FeatureBag>& bags, const std::vector<Verdict>& labels,
                       const model::TrainConfig& config, model::TrainTrace* trace = nullptr) {
  FittedModel f;
  f.vocabulary = model::fit_vocabulary(bags);
  std::vector<model::SparseVector> X;
  X.reserve(bags.size());
  for (const auto& b : bags) X.push_back(model::transform(b, f.vocabulary));
  f.model = model::train(X, labels, f.vocabulary.size(), config, trace);
  return f;
}

class Classifier {
 public:
  static constexpr const char* kMagic = "triage-linear-model";
  static constexpr int kVersion = 1;

  Classifier() = default;
  Classifier(features::ExtractorConfig config, FittedModel fitted)
      : config_(std::move(config)), fitted_(std::move(fitted)) {
    config_.validate();
    if (fitted_.model.weights.size() != fitted_.vocabulary.size())
      throw ValidationError("model has " + std::to_string(fitted_.model.weights.size()) + " weights for a vocabulary of " +
                            std::to_string(fitted_.vocabulary.size()));
  }

  static Classifier train(const std::vector<std::string>& texts, const std::vector<Verdict>& labels,
                          const features::ExtractorConfig& config, const features::Handles& handles,
                          const model::TrainConfig& train_config) {
    std::vector<features::FeatureBag> bags;
    bags.reserve(texts.size());
    for (const auto& t : texts) bags.push_back(features::compose(t, config, handles));
    return Classifier(config, fit(bags, labels, train_config));
  }

  const features::ExtractorConfig& config() const noexcept { return config_; }
  const model::Vocabulary& vocabulary() const noexcept { return fitted_.vocabulary; }
  const model::LinearModel& model() const noexcept { return fitted_.model; }

  model::SparseVector vectorize(std::string_view text, const features::Handles& handles) const {
    return model::transform(features::compose(text, config_, handles), fitted_.vocabulary);
  }

  model::Prediction classify(std::string_view text, const features::Handles& handles) const {
    return model::predict(fitted_.model, vectorize(text, handles));
  }

  std::string serialize() const {
    std::string out;
    char buf[64];
    auto num = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    const auto& m = fitted_.model;
    const auto& v = fitted_.vocabulary;
    out += std::string(kMagic) + " " + std::to_string(kVersion) + "\n";
    out += "vocabulary " + std::to_string(v.size()) + "\n";
    out += "C " + num(m.C) + "\n";
    out += "bias " + num(m.bias) + "\n";
    out += "features " + config_.enabled.label() + "\n";
    out += "ngram " + std::to_string(config_.ngram_min) + " " + std::to_string(config_.ngram_max) + "\n";
    out += "drop_digit_tokens " + std::string(config_.drop_digit_tokens ? "1" : "0") + "\n";
    out += "doc_count " + std::to_string(v.doc_count) + "\n";
    out += "positive " + std::string(to_string(m.positive_label)) + "\n";
    out += "stopwords " + std::to_string(config_.stopwords.size()) + "\n";
    for (const auto& w : config_.stopwords) out += "stopword\t" + w + "\n";
    for (const auto& [token, col] : v.index)
      out += "entry\t" + token + "\t" + num(v.idf[col]) + "\t" + num(m.weights[col]) + "\n";
    return out;
  }

  static Classifier parse(std::string_view content, const std::string& source = "model") {
    const auto lines = morph::Lexicon::split_lines(content);
    std::size_t ln = 0;
    auto fail = [&](const std::string& what) -> LoadError { return LoadError(source, ln, what); };
    auto next = [&]() -> const std::string& {
      if (ln >= lines.size()) {
        ++ln;
        throw fail("unexpected end of file");
      }
      return lines[ln++];
    };
    auto to_double = [&](const std::string& s) {
      char* end = nullptr;
      const double d = std::strtod(s.c_str(), &end);
      if (s.empty() || *end != '\0' || !std::isfinite(d)) throw fail("bad number '" + s + "'");
      return d;
    };
    auto to_size = [&](const std::string& s) {
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw fail("bad count '" + s + "'");
      return static_cast<std::size_t>(std::stoull(s));
    };
    auto field = [&](const char* key) {
      const std::string& line = next();
      const std::string prefix = std::string(key) + " ";
      if (line.rfind(prefix, 0) != 0) throw fail(std::string("expected '") + key + " ...'");
      return line.substr(prefix.size());
    };

    if (next() != std::string(kMagic) + " " + std::to_string(kVersion))
      throw fail(std::string("not a ") + kMagic + " version " + std::to_string(kVersion) + " file");
    const std::size_t V = to_size(field("vocabulary"));
    features::ExtractorConfig cfg;
    FittedModel f;
    f.model.C = to_double(field("C"));
    if (!(f.model.C > 0)) throw fail("C must be positive");
    f.model.bias = to_double(field("bias"));
    try {
      cfg.enabled = features::ExtractorSet::parse(field("features"));
    } catch (const ValidationError& e) {
      throw fail(e.what());
    }
    {
      const auto parts = morph::Lexicon::split(field("ngram"), ' ');
      if (parts.size() != 2) throw fail("expected 'ngram <min> <max>'");
      cfg.ngram_min = static_cast<int>(to_size(parts[0]));
      cfg.ngram_max = static_cast<int>(to_size(parts[1]));
    }
    const auto digits = field("drop_digit_tokens");
    if (digits != "0" && digits != "1") throw fail("drop_digit_tokens must be 0 or 1");
    cfg.drop_digit_tokens = digits == "1";
    f.vocabulary.doc_count = to_size(field("doc_count"));
    const auto positive = parse_verdict(field("positive"));
    if (positive != Verdict::NonIssue) throw fail("positive class must be NonIssue");
    const std::size_t nstop = to_size(field("stopwords"));
    for (std::size_t i = 0; i < nstop; ++i) {
      const auto& line = next();
      if (line.rfind("stopword\t", 0) != 0) throw fail("expected 'stopword<TAB>word'");
      cfg.stopwords.insert(line.substr(9));
    }
    f.vocabulary.idf.reserve(V);
    f.model.weights.reserve(V);
    std::string prev;
    for (std::size_t i = 0; i < V; ++i) {
      const auto parts = morph::Lexicon::split(next(), '\t');
      if (parts.size() != 4 || parts[0] != "entry") throw fail("expected 'entry<TAB>token<TAB>idf<TAB>weight'");
      if (i > 0 && !(prev < parts[1])) throw fail("entries not sorted by token");
      prev = parts[1];
      const double idf = to_double(parts[2]);
      if (!(idf > 0)) throw fail("idf must be positive");
      f.vocabulary.index.emplace(parts[1], static_cast<model::Column>(i));
      f.vocabulary.idf.push_back(idf);
      f.model.weights.push_back(to_double(parts[3]));
    }
    while (ln < lines.size()) {
      ++ln;
      if (!lines[ln - 1].empty()) throw fail("unexpected content after the last entry");
    }
    try {
      return Classifier(std::move(cfg), std::move(f));
    } catch (const ValidationError& e) {
      throw LoadError(source, ln, e.what());
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    out << serialize();
    if (!out.flush()) throw Error("failed writing '" + path + "'");
  }

  static Classifier load(const std::string& path) { return parse(morph::Lexicon::read_file(path), path); }

 private:
  features::ExtractorConfig config_;
  FittedModel fitted_;
};

}  // namespace triage
