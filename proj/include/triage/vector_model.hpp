#pragma once

// tf-idf vectorization and an L2-regularized hinge-loss linear classifier.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "triage/error.hpp"
#include "triage/features.hpp"
#include "triage/verdict.hpp"

namespace triage::model {

using Column = std::uint32_t;

struct Vocabulary {
  std::map<std::string, Column> index;  // token -> column, columns in token order
  std::vector<double> idf;
  std::size_t doc_count = 0;

  std::size_t size() const noexcept { return idf.size(); }

  std::optional<Column> find(const std::string& token) const {
    auto it = index.find(token);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

/// Entries sorted by strictly increasing column, values finite and nonzero.
struct SparseVector {
  std::vector<std::pair<Column, double>> entries;

  bool empty() const noexcept { return entries.empty(); }

  double norm() const {
    double s = 0;
    for (const auto& [c, v] : entries) s += v * v;
    return std::sqrt(s);
  }

  double dot(const std::vector<double>& dense) const {
    double s = 0;
    for (const auto& [c, v] : entries) s += dense[c] * v;
    return s;
  }

  double dot(const SparseVector& o) const {
    double s = 0;
    auto a = entries.begin();
    auto b = o.entries.begin();
    while (a != entries.end() && b != o.entries.end()) {
      if (a->first < b->first) ++a;
      else if (b->first < a->first) ++b;
      else s += (a++)->second * (b++)->second;
    }
    return s;
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// idf_c = ln((1 + N) / (1 + df_c)) + 1 over every key seen in `bags`.
inline Vocabulary fit_vocabulary(const std::vector<features::FeatureBag>& bags) {
  if (bags.empty()) throw ValidationError("fit_vocabulary needs at least one bag");
  std::map<std::string, std::size_t> df;
  for (const auto& bag : bags)
    for (const auto& [key, count] : bag.counts()) ++df[key];

  Vocabulary v;
  v.doc_count = bags.size();
  v.idf.reserve(df.size());
  const double n = static_cast<double>(bags.size());
  Column col = 0;
  for (const auto& [key, d] : df) {
    v.index.emplace(key, col++);
    v.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(d))) + 1.0);
  }
  return v;
}

/// count * idf for in-vocabulary keys, L2-normalized.
inline SparseVector transform(const features::FeatureBag& bag, const Vocabulary& vocab) {
  SparseVector x;
  for (const auto& [key, count] : bag.counts()) {
    if (auto c = vocab.find(key)) x.entries.emplace_back(*c, static_cast<double>(count) * vocab.idf[*c]);
  }
  // map iteration is in key order, and so are the columns
  const double n = x.norm();
  if (n > 0)
    for (auto& [c, v] : x.entries) v /= n;
  std::erase_if(x.entries, [](const auto& e) { return e.second == 0.0; });
  return x;
}

struct TrainConfig {
  double C = 1.0;
  int max_epochs = 1000;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(C > 0) || !std::isfinite(C)) throw ValidationError("C must be a positive finite number");
    if (max_epochs <= 0) throw ValidationError("max_epochs must be positive");
    if (!(tolerance > 0)) throw ValidationError("tolerance must be positive");
  }
};

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  double C = 1.0;
  Verdict positive_label = Verdict::NonIssue;

  double margin(const SparseVector& x) const {
    double s = bias;
    for (const auto& [c, v] : x.entries)
      if (c < weights.size()) s += weights[c] * v;
    return s;
  }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct Prediction {
  Verdict label = Verdict::Issue;
  double margin = 0.0;
};

/// NonIssue iff the margin is strictly positive; a tie stays Issue.
inline Prediction predict(const LinearModel& m, const SparseVector& x) {
  const double margin = m.margin(x);
  return {margin > 0 ? Verdict::NonIssue : Verdict::Issue, margin};
}

/// (1/2)|w|^2 + C * sum max(0, 1 - y (w.x + b)).
inline double primal_objective(const std::vector<double>& w, double b, double C, const std::vector<SparseVector>& X,
                               const std::vector<int>& y) {
  double reg = 0;
  for (double v : w) reg += v * v;
  double loss = 0;
  for (std::size_t i = 0; i < X.size(); ++i) loss += std::max(0.0, 1.0 - y[i] * (X[i].dot(w) + b));
  return 0.5 * reg + C * loss;
}

/// Per-epoch record of a training run.
struct TrainTrace {
  std::vector<double> objective;  // primal objective of the model after each epoch
  int epochs = 0;
  bool converged = false;
};

namespace detail {

/// Bias minimizing the hinge sum for fixed scores s_i = w.x_i; the midpoint
/// of the minimizing interval when it is not a single point.
inline double best_bias(const std::vector<double>& scores, const std::vector<int>& y) {
  // positive i is penalized for b < 1 - s_i, negative i for b > -1 - s_i
  std::vector<std::pair<double, int>> pts;
  pts.reserve(y.size());
  std::size_t pos_above = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] > 0) {
      pts.emplace_back(1.0 - scores[i], 1);
      ++pos_above;
    } else {
      pts.emplace_back(-1.0 - scores[i], -1);
    }
  }
  std::sort(pts.begin(), pts.end());
  long neg_below = 0;
  long above = static_cast<long>(pos_above);
  for (std::size_t k = 0; k < pts.size();) {
    const double z = pts[k].first;
    while (k < pts.size() && pts[k].first == z) {
      if (pts[k].second > 0) --above;
      else ++neg_below;
      ++k;
    }
    const long right_slope = neg_below - above;
    if (right_slope > 0) return z;
    if (right_slope == 0) return k < pts.size() ? 0.5 * (z + pts[k].first) : z;
  }
  return pts.empty() ? 0.0 : pts.back().first;
}

/// Exact minimizer over t in [0, 1] of the primal along (w,b) + t (dw,db).
inline double line_search(const std::vector<double>& w, double b, const std::vector<double>& dw, double db, double C,
                          const std::vector<SparseVector>& X, const std::vector<int>& y) {
  double w_dw = 0, dw_dw = 0;
  for (std::size_t c = 0; c < w.size(); ++c) {
    w_dw += w[c] * dw[c];
    dw_dw += dw[c] * dw[c];
  }
  // hinge_i(t) = max(0, u_i - t v_i)
  double slope_sum = 0;  // sum of v_i over active terms
  std::vector<std::pair<double, double>> breaks;  // (t, v_i)
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double u = 1.0 - y[i] * (X[i].dot(w) + b);
    const double v = y[i] * (X[i].dot(dw) + db);
    const bool active = u > 0 || (u == 0 && v < 0);
    if (active) slope_sum += v;
    if (v != 0) {
      const double t = u / v;
      if (t > 0 && t < 1) breaks.emplace_back(t, v);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  double left = 0;
  std::size_t k = 0;
  for (;;) {
    const double right = k < breaks.size() ? breaks[k].first : 1.0;
    // derivative on (left, right): w_dw + t dw_dw - C slope_sum
    const double a = w_dw - C * slope_sum;
    if (a + left * dw_dw >= 0) return left;
    if (dw_dw > 0) {
      const double root = -a / dw_dw;
      if (root < right) return root;
    }
    if (k >= breaks.size()) return 1.0;
    const double t = breaks[k].first;
    while (k < breaks.size() && breaks[k].first == t) {
      // v > 0: the term switches off at t; v < 0: it switches on
      const double v = breaks[k].second;
      if (v > 0) slope_sum -= v;
      else slope_sum += v;
      ++k;
    }
    left = t;
  }
}

}  // namespace detail

/// Minimizes (1/2)|w|^2 + C sum max(0, 1 - y_i (w.x_i + b)) with an
/// unregularized intercept.
///
/// Each epoch sweeps the examples in a seeded order, pairing each with the
/// most violating partner and solving the two-variable dual subproblem
/// exactly (the intercept couples the duals through sum alpha_i y_i = 0).
/// The returned model is a primal iterate that moves toward the dual's
/// current hyperplane by exact line search, so its objective never rises
/// from one epoch to the next. Training stops once that decrease drops
/// below `tolerance` (relative) and the dual's largest KKT violation is
/// under 10 * tolerance, or after `max_epochs`.
inline LinearModel train(const std::vector<SparseVector>& X, const std::vector<Verdict>& labels, std::size_t dim,
                         const TrainConfig& config, TrainTrace* trace = nullptr) {
  config.validate();
  if (X.size() != labels.size())
    throw ValidationError("got " + std::to_string(X.size()) + " vectors but " + std::to_string(labels.size()) +
                          " labels");
  for (const auto& x : X)
    for (const auto& [c, v] : x.entries)
      if (c >= dim) throw ValidationError("column " + std::to_string(c) + " outside dimension " + std::to_string(dim));
  const std::size_t n = X.size();
  std::vector<int> y(n);
  std::size_t npos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = sign_of(labels[i]);
    npos += y[i] > 0;
  }
  if (n < 2 || npos == 0 || npos == n)
    throw TrainingError("training needs both NonIssue and Issue examples (got " + std::to_string(npos) +
                        " NonIssue of " + std::to_string(n) + ")");

  const double C = config.C;
  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) qd[i] = X[i].dot(X[i]);

  std::vector<double> alpha(n, 0.0);
  std::vector<double> w(dim, 0.0);   // dual hyperplane, sum alpha_i y_i x_i
  std::vector<double> grad(n, -1.0);  // y_i w.x_i - 1, refreshed lazily
  auto fresh_grad = [&](std::size_t i) { return y[i] * X[i].dot(w) - 1.0; };
  auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C); };

  std::vector<double> scores(n, 0.0);
  auto scores_of = [&](const std::vector<double>& ww) {
    for (std::size_t i = 0; i < n; ++i) scores[i] = X[i].dot(ww);
    return scores;
  };

  // primal iterate
  std::vector<double> pw(dim, 0.0);
  double pb = detail::best_bias(scores_of(pw), y);
  double pobj = primal_objective(pw, pb, C, X, y);

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  constexpr double kTau = 1e-12;

  TrainTrace local;
  TrainTrace& tr = trace ? *trace : local;
  tr = {};

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    for (std::size_t k = n - 1; k > 0; --k) std::swap(order[k], order[rng() % (k + 1)]);

    for (std::size_t i : order) {
      grad[i] = fresh_grad(i);
      const double fi = -y[i] * grad[i];
      // best partner from the cached gradients
      std::size_t j = n;
      double best = kTau;
      for (std::size_t t = 0; t < n; ++t) {
        if (t == i) continue;
        const double ft = -y[t] * grad[t];
        if (in_up(i) && in_low(t) && fi - ft > best) {
          best = fi - ft;
          j = t;
        }
        if (in_low(i) && in_up(t) && ft - fi > best) {
          best = ft - fi;
          j = t;
        }
      }
      if (j == n) continue;
      grad[j] = fresh_grad(j);

      const double kij = X[i].dot(X[j]);
      const double qij = y[i] * y[j] * kij;
      const double old_i = alpha[i], old_j = alpha[j];
      if (y[i] != y[j]) {
        double quad = qd[i] + qd[j] + 2 * qij;
        if (quad <= 0) quad = kTau;
        const double delta = (-grad[i] - grad[j]) / quad;
        const double diff = alpha[i] - alpha[j];
        alpha[i] += delta;
        alpha[j] += delta;
        if (diff > 0) {
          if (alpha[j] < 0) {
            alpha[j] = 0;
            alpha[i] = diff;
          }
        } else if (alpha[i] < 0) {
          alpha[i] = 0;
          alpha[j] = -diff;
        }
        if (diff > 0) {
          if (alpha[i] > C) {
            alpha[i] = C;
            alpha[j] = C - diff;
          }
        } else if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = C + diff;
        }
      } else {
        double quad = qd[i] + qd[j] - 2 * qij;
        if (quad <= 0) quad = kTau;
        const double delta = (grad[i] - grad[j]) / quad;
        const double sum = alpha[i] + alpha[j];
        alpha[i] -= delta;
        alpha[j] += delta;
        if (sum > C) {
          if (alpha[i] > C) {
            alpha[i] = C;
            alpha[j] = sum - C;
          }
        } else if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = sum;
        }
        if (sum > C) {
          if (alpha[j] > C) {
            alpha[j] = C;
            alpha[i] = sum - C;
          }
        } else if (alpha[i] < 0) {
          alpha[i] = 0;
          alpha[j] = sum;
        }
      }
      const double di = (alpha[i] - old_i) * y[i];
      const double dj = (alpha[j] - old_j) * y[j];
      for (const auto& [c, v] : X[i].entries) w[c] += di * v;
      for (const auto& [c, v] : X[j].entries) w[c] += dj * v;
      grad[i] = fresh_grad(i);
      grad[j] = fresh_grad(j);
    }

    // epoch end: exact gradients, KKT gap, primal step
    double up_max = -std::numeric_limits<double>::infinity();
    double low_min = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] = fresh_grad(t);
      const double ft = -y[t] * grad[t];
      if (in_up(t)) up_max = std::max(up_max, ft);
      if (in_low(t)) low_min = std::min(low_min, ft);
    }
    const double gap = up_max - low_min;

    const double cb = detail::best_bias(scores_of(w), y);
    std::vector<double> dw(dim);
    for (std::size_t c = 0; c < dim; ++c) dw[c] = w[c] - pw[c];
    const double db = cb - pb;
    const double t = detail::line_search(pw, pb, dw, db, C, X, y);
    const double prev = pobj;
    if (t > 0) {
      std::vector<double> nw(dim);
      for (std::size_t c = 0; c < dim; ++c) nw[c] = pw[c] + t * dw[c];
      const double nb = pb + t * db;
      const double nobj = primal_objective(nw, nb, C, X, y);
      if (nobj < pobj) {
        pw = std::move(nw);
        pb = nb;
        pobj = nobj;
      }
    }
    tr.objective.push_back(pobj);
    tr.epochs = epoch + 1;
    if (prev - pobj <= config.tolerance * std::max(1.0, prev) && gap <= 10 * config.tolerance) {
      tr.converged = true;
      break;
    }
  }

  LinearModel m;
  m.weights = std::move(pw);
  m.bias = pb;
  m.C = C;
  return m;
}

}  // namespace triage::model
