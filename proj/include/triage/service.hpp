#pragma once

// Prediction with confidence gating, and the HTTP API over a model, the
// pattern catalog and a label store.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "triage/classifier.hpp"
#include "triage/corpus.hpp"
#include "triage/resources.hpp"

namespace triage::service {

inline constexpr double kDefaultThreshold = 0.75;

/// Logistic squash of the raw margin, scale 1.
inline double confidence(double margin) { return 1.0 / (1.0 + std::exp(-margin)); }

/// Only NonIssue verdicts are ever held back for a human.
inline bool gated(Verdict v, double conf, double threshold) { return v == Verdict::NonIssue && conf < threshold; }

/// "text:" plus the 64-bit FNV-1a hash of `text` in hex.
inline std::string text_id(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "text:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct PredictionResponse {
  std::string id;
  Verdict verdict = Verdict::Issue;
  double margin = 0;
  double confidence = 0;
  std::vector<std::string> matched_patterns;
  bool gated = false;
};

/// `id` defaults to the text hash. Pattern codes are listed once each, in
/// order of the sentence where they first fire.
inline PredictionResponse predict(const Classifier& model, const Resources& res, const std::string& summary,
                                  const std::string& description, std::optional<std::string> id = std::nullopt,
                                  double threshold = kDefaultThreshold) {
  const std::string text = summary + "\n" + description;
  const auto p = model.classify(text, res.handles());
  PredictionResponse r;
  r.id = id ? *id : text_id(text);
  r.verdict = p.label;
  r.margin = p.margin;
  r.confidence = confidence(p.margin);
  r.gated = gated(r.verdict, r.confidence, threshold);
  auto matches = patterns::match_patterns(text, res.catalog, res.analyzer);
  std::stable_sort(matches.begin(), matches.end(), [](const auto& a, const auto& b) {
    return std::tie(a.sentence_index, a.code) < std::tie(b.sentence_index, b.code);
  });
  for (const auto& m : matches)
    if (std::find(r.matched_patterns.begin(), r.matched_patterns.end(), m.code) == r.matched_patterns.end())
      r.matched_patterns.push_back(m.code);
  return r;
}

inline nlohmann::ordered_json to_json(const PredictionResponse& r) {
  return {{"id", r.id},
          {"verdict", std::string(to_string(r.verdict))},
          {"margin", r.margin},
          {"confidence", r.confidence},
          {"matched_patterns", r.matched_patterns},
          {"gated", r.gated}};
}

inline nlohmann::ordered_json to_json(const patterns::PatternRule& rule) {
  return {{"code", rule.code},
          {"trigger_roots", rule.trigger_roots},
          {"trigger_suffix", rule.trigger_suffix ? nlohmann::ordered_json(patterns::suffix_descriptor(rule.trigger_suffix))
                                                 : nlohmann::ordered_json(nullptr)},
          {"scope", rule.scope == patterns::Scope::Sentence ? "Sentence" : "Document"}};
}

struct Settings {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string model_path;
  std::string store_path;
  double threshold = kDefaultThreshold;

  void validate() const {
    if (port < 0 || port > 65535) throw ValidationError("port must be in [0, 65535]");
    if (!(threshold >= 0 && threshold <= 1)) throw ValidationError("threshold must lie in [0, 1]");
  }
};

/// TRIAGE_PORT, TRIAGE_MODEL, TRIAGE_STORE and TRIAGE_THRESHOLD replace the
/// corresponding fields when set.
inline void apply_environment(Settings& s) {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  auto number = [](const std::string& v, const char* name) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (*end != '\0') throw ValidationError(std::string(name) + " is not a number: '" + v + "'");
    return d;
  };
  if (auto v = env("TRIAGE_PORT")) s.port = static_cast<int>(number(*v, "TRIAGE_PORT"));
  if (auto v = env("TRIAGE_MODEL")) s.model_path = *v;
  if (auto v = env("TRIAGE_STORE")) s.store_path = *v;
  if (auto v = env("TRIAGE_THRESHOLD")) s.threshold = number(*v, "TRIAGE_THRESHOLD");
}

/// Route handlers. The model and resources are read-only; the store does
/// its own locking. Either of model and store may be absent, in which case
/// the endpoints needing it answer 503.
class Api {
 public:
  Api(const Resources& resources, const Classifier* model, corpus::Store* store, double threshold)
      : res_(resources), model_(model), store_(store), threshold_(threshold) {}

  void mount(httplib::Server& server) const {
    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) { health(res); });
    server.Post("/predict", [this](const httplib::Request& req, httplib::Response& res) { predict_route(req, res); });
    server.Get("/reports/next", [this](const httplib::Request& req, httplib::Response& res) { next(req, res); });
    server.Post("/labels", [this](const httplib::Request& req, httplib::Response& res) { label(req, res); });
    server.Get("/patterns", [this](const httplib::Request&, httplib::Response& res) { patterns_route(res); });
    server.Get("/stats/distribution",
               [this](const httplib::Request&, httplib::Response& res) { distribution(res); });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      error(res, 500, "internal", what);
    });
  }

 private:
  static void send(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    send(res, status, {{"error", {{"code", code}, {"message", message}}}});
  }

  static std::optional<nlohmann::json> body_object(const httplib::Request& req, httplib::Response& res) {
    auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      error(res, 400, "bad_request", "request body must be a JSON object");
      return std::nullopt;
    }
    return j;
  }

  bool need_model(httplib::Response& res) const {
    if (model_) return true;
    error(res, 503, "model_not_loaded", "no model is loaded");
    return false;
  }

  bool need_store(httplib::Response& res) const {
    if (store_) return true;
    error(res, 503, "store_not_loaded", "no label store is open");
    return false;
  }

  void health(httplib::Response& res) const {
    if (!need_model(res)) return;
    nlohmann::ordered_json j{{"status", "ok"},
                             {"vocabulary", model_->vocabulary().size()},
                             {"features", model_->config().enabled.label()},
                             {"threshold", threshold_},
                             {"store", store_ != nullptr}};
    send(res, 200, j);
  }

  // {"summary": ..., "description": ..., "id"?: ...} or {"report_id": ...}
  void predict_route(const httplib::Request& req, httplib::Response& res) const {
    if (!need_model(res)) return;
    auto j = body_object(req, res);
    if (!j) return;
    try {
      std::string summary, description;
      std::optional<std::string> id;
      if (j->contains("summary")) {
        summary = corpus::detail::string_field(*j, "summary");
        description = corpus::detail::string_field(*j, "description", false);
        if (j->contains("id")) id = corpus::detail::string_field(*j, "id");
      } else if (j->contains("report_id")) {
        if (!need_store(res)) return;
        const auto rid = corpus::detail::string_field(*j, "report_id");
        const auto report = store_->report(rid);
        if (!report) return error(res, 404, "not_found", "unknown report '" + rid + "'");
        summary = report->summary;
        description = report->description;
        id = report->id;
      } else {
        return error(res, 400, "bad_request", "body needs 'summary' (and 'description') or 'report_id'");
      }
      send(res, 200, to_json(predict(*model_, res_, summary, description, id, threshold_)));
    } catch (const ValidationError& e) {
      error(res, 400, "bad_request", e.what());
    }
  }

  void next(const httplib::Request& req, httplib::Response& res) const {
    if (!need_store(res)) return;
    auto strategy = corpus::Strategy::RoundRobinByProject;
    if (req.has_param("strategy")) {
      auto s = corpus::parse_strategy(req.get_param_value("strategy"));
      if (!s) return error(res, 400, "bad_request", "strategy must be RoundRobinByProject or Fifo");
      strategy = *s;
    }
    const auto report = store_->next_unlabeled(strategy);
    nlohmann::ordered_json j{{"report", report ? corpus::to_json(*report) : nlohmann::ordered_json(nullptr)},
                             {"labeled", store_->labeled_count()},
                             {"total", store_->report_count()}};
    send(res, 200, j);
  }

  void label(const httplib::Request& req, httplib::Response& res) const {
    if (!need_store(res)) return;
    auto j = body_object(req, res);
    if (!j) return;
    corpus::LabelRecord record;
    try {
      record = corpus::label_from_json(*j, corpus::now());
    } catch (const ValidationError& e) {
      return error(res, 400, "bad_request", e.what());
    }
    try {
      store_->save_label(record, res_.catalog);
    } catch (const NotFoundError& e) {
      return error(res, 404, "not_found", e.what());
    } catch (const ConflictError& e) {
      return error(res, 409, "conflict", e.what());
    }
    send(res, 201, corpus::to_json(record));
  }

  void patterns_route(httplib::Response& res) const {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& r : res_.catalog.rules()) list.push_back(to_json(r));
    send(res, 200, {{"patterns", list}});
  }

  void distribution(httplib::Response& res) const {
    if (!need_store(res)) return;
    send(res, 200, corpus::to_json(store_->distribution()));
  }

  const Resources& res_;
  const Classifier* model_;
  corpus::Store* store_;
  double threshold_;
};

}  // namespace triage::service
