#pragma once

// Stratified k-fold cross-validation, precision/recall/F1 with NonIssue as
// the positive class, and the extractor ablation report.

#include <algorithm>
#include <cstdio>
#include <future>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "triage/classifier.hpp"
#include "triage/error.hpp"
#include "triage/features.hpp"

namespace triage::eval {

struct FoldPlan {
  int k = 0;
  std::vector<int> assignment;  // report -> test fold

  std::vector<std::size_t> test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
      if (assignment[i] == fold) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
      if (assignment[i] != fold) out.push_back(i);
    return out;
  }
};

/// Shuffles each class with the seeded generator and deals it round-robin
/// over the folds; the second class continues where the first stopped, so
/// fold sizes differ by at most one overall and per class.
inline FoldPlan stratified_folds(const std::vector<Verdict>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k must be at least 2");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] == Verdict::NonIssue].push_back(i);
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < static_cast<std::size_t>(k))
      throw ValidationError("class " + std::string(to_string(c ? Verdict::NonIssue : Verdict::Issue)) + " has only " +
                            std::to_string(by_class[c].size()) + " reports, fewer than k=" + std::to_string(k) +
                            "; use a smaller k");
  }
  std::mt19937_64 rng(seed);
  FoldPlan plan;
  plan.k = k;
  plan.assignment.assign(labels.size(), -1);
  std::size_t dealt = 0;
  for (auto& members : by_class) {
    for (std::size_t j = members.size() - 1; j > 0; --j) std::swap(members[j], members[rng() % (j + 1)]);
    for (std::size_t idx : members) plan.assignment[idx] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
  }
  return plan;
}

struct Metrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

/// Zero denominators give 0.
inline Metrics metrics(const std::vector<Verdict>& predictions, const std::vector<Verdict>& truth,
                       Verdict positive = Verdict::NonIssue) {
  if (predictions.size() != truth.size())
    throw ValidationError("got " + std::to_string(predictions.size()) + " predictions for " +
                          std::to_string(truth.size()) + " labels");
  if (truth.empty()) throw ValidationError("metrics need at least one prediction");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predictions[i] == positive, t = truth[i] == positive;
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
  }
  Metrics m;
  m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

struct MetricsRow {
  std::string feature_set;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::vector<Metrics> folds;
};

/// Fits vocabulary and model on the training side of `fold` only.
inline FittedModel train_fold(const std::vector<features::FeatureBag>& bags, const std::vector<Verdict>& labels,
                              const FoldPlan& plan, int fold, const model::TrainConfig& config) {
  std::vector<features::FeatureBag> train_bags;
  std::vector<Verdict> train_labels;
  for (std::size_t i : plan.train_indices(fold)) {
    train_bags.push_back(bags[i]);
    train_labels.push_back(labels[i]);
  }
  return fit(train_bags, train_labels, config);
}

inline Metrics evaluate_fold(const std::vector<features::FeatureBag>& bags, const std::vector<Verdict>& labels,
                             const FoldPlan& plan, int fold, const model::TrainConfig& config) {
  const auto fitted = train_fold(bags, labels, plan, fold, config);
  std::vector<Verdict> pred, truth;
  for (std::size_t i : plan.test_indices(fold)) {
    pred.push_back(model::predict(fitted.model, model::transform(bags[i], fitted.vocabulary)).label);
    truth.push_back(labels[i]);
  }
  return metrics(pred, truth);
}

struct CvOptions {
  int k = 10;
  std::uint64_t seed = 0;
  model::TrainConfig train;
  unsigned threads = 1;  // 0 = hardware concurrency
};

/// One row per requested subset, in request order; each row averages the
/// k folds' metrics with equal weight.
inline std::vector<MetricsRow> cross_validate(const std::vector<features::ExtractedParts>& parts,
                                              const std::vector<Verdict>& labels,
                                              const std::vector<features::ExtractorSet>& subsets,
                                              const CvOptions& options) {
  if (parts.size() != labels.size())
    throw ValidationError("got " + std::to_string(parts.size()) + " reports but " + std::to_string(labels.size()) +
                          " labels");
  const auto plan = stratified_folds(labels, options.k, options.seed);
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());

  std::vector<MetricsRow> rows;
  for (const auto& subset : subsets) {
    if (subset.empty()) throw ValidationError("empty extractor subset");
    std::vector<features::FeatureBag> bags;
    bags.reserve(parts.size());
    for (const auto& p : parts) bags.push_back(p.compose(subset));

    MetricsRow row;
    row.feature_set = subset.label();
    row.folds.resize(static_cast<std::size_t>(options.k));
    if (threads <= 1) {
      for (int f = 0; f < options.k; ++f) row.folds[f] = evaluate_fold(bags, labels, plan, f, options.train);
    } else {
      for (int start = 0; start < options.k; start += static_cast<int>(threads)) {
        std::vector<std::future<Metrics>> pending;
        const int end = std::min(options.k, start + static_cast<int>(threads));
        for (int f = start; f < end; ++f)
          pending.push_back(std::async(std::launch::async, [&, f] {
            return evaluate_fold(bags, labels, plan, f, options.train);
          }));
        for (int f = start; f < end; ++f) row.folds[f] = pending[f - start].get();
      }
    }
    for (const auto& m : row.folds) {
      row.precision += m.precision;
      row.recall += m.recall;
      row.f1 += m.f1;
    }
    row.precision /= options.k;
    row.recall /= options.k;
    row.f1 /= options.k;
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Extracts every text once, then cross-validates each subset.
inline std::vector<MetricsRow> cross_validate(const std::vector<std::string>& texts, const std::vector<Verdict>& labels,
                                              const std::vector<features::ExtractorSet>& subsets,
                                              const features::ExtractorConfig& config, const features::Handles& handles,
                                              const CvOptions& options) {
  features::ExtractorSet needed;
  for (auto s : subsets) needed = needed | s;
  std::vector<features::ExtractedParts> parts;
  parts.reserve(texts.size());
  for (const auto& t : texts) parts.push_back(features::extract_parts(t, config, handles, needed));
  return cross_validate(parts, labels, subsets, options);
}

inline std::string format_table(const std::vector<MetricsRow>& rows) {
  std::size_t width = std::string("Feature set").size();
  for (const auto& r : rows) width = std::max(width, r.feature_set.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %4s  %4s  %4s\n", static_cast<int>(width), "Feature set", "P", "R", "F1");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %.2f  %.2f  %.2f\n", static_cast<int>(width), r.feature_set.c_str(),
                  r.precision, r.recall, r.f1);
    out += buf;
  }
  return out;
}

/// One JSON object per row, newline separated.
inline std::string format_records(const std::vector<MetricsRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& m : r.folds) folds.push_back({{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}});
    nlohmann::json j{{"feature_set", r.feature_set},
                     {"precision", r.precision},
                     {"recall", r.recall},
                     {"f1", r.f1},
                     {"folds", folds}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace triage::eval
