#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "test_support.hpp"
#include "triage/service.hpp"

using namespace triage;
using namespace triage::service;
using nlohmann::json;
using testing_support::TempDir;

namespace {

const char* kRequestSentence = "Başvurunun arşive kaldırılmasını rica ederiz.";

std::vector<corpus::LabeledReport> small_corpus() {
  corpus::GeneratorConfig g;
  g.n = 400;
  g.prevalence = 0.15;
  g.seed = 11;
  return corpus::generate_synthetic(g);
}

const Classifier& trained() {
  static const Classifier c = [] {
    const auto& r = testing_support::resources();
    std::vector<std::string> texts;
    std::vector<Verdict> y;
    for (const auto& lr : small_corpus()) {
      texts.push_back(lr.report.text());
      y.push_back(lr.label.verdict);
    }
    return Classifier::train(texts, y, r.config(), r.handles(), {});
  }();
  return c;
}

/// Serves `api` on an ephemeral loopback port for the object's lifetime.
class Running {
 public:
  explicit Running(const Api& api) {
    api.mount(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~Running() {
    server_.stop();
    thread_.join();
  }

  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

httplib::Result post(httplib::Client& c, const std::string& path, const json& body) {
  return c.Post(path, body.dump(), "application/json");
}

std::string error_code(const httplib::Result& r) { return json::parse(r->body)["error"]["code"]; }

corpus::IssueReport report(const std::string& id, const std::string& project, const std::string& summary,
                           const std::string& description) {
  return {id, project, summary, description, 1700000000};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Confidence, LogisticOfMargin) {
  EXPECT_DOUBLE_EQ(confidence(0), 0.5);
  EXPECT_NEAR(confidence(1), 0.7310585786300049, 1e-15);
  EXPECT_NEAR(confidence(-2) + confidence(2), 1.0, 1e-15);
  EXPECT_GE(confidence(-800), 0.0);
  EXPECT_LE(confidence(800), 1.0);
}

TEST(Confidence, GatingOnlyHoldsBackNonIssue) {
  EXPECT_TRUE(gated(Verdict::NonIssue, 0.6, 0.75));
  EXPECT_FALSE(gated(Verdict::NonIssue, 0.75, 0.75));
  EXPECT_FALSE(gated(Verdict::Issue, 0.1, 0.75));
  EXPECT_FALSE(gated(Verdict::Issue, 0.1, 1.0));
}

TEST(Confidence, RaisingThresholdNeverUngates) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> margin(-6, 6), unit(0, 1);
  for (int i = 0; i < 5000; ++i) {
    const double m = margin(rng);
    const Verdict v = m > 0 ? Verdict::NonIssue : Verdict::Issue;
    double lo = unit(rng), hi = unit(rng);
    if (lo > hi) std::swap(lo, hi);
    if (gated(v, confidence(m), lo)) { EXPECT_TRUE(gated(v, confidence(m), hi)) << m << " " << lo << " " << hi; }
  }
}

TEST(TextId, Fnv1a64) {
  EXPECT_EQ(text_id(""), "text:cbf29ce484222325");
  EXPECT_EQ(text_id("a"), "text:af63dc4c8601ec8c");
  EXPECT_NE(text_id("ab"), text_id("ba"));
}

TEST(Predict, RequestSentenceIsConfidentNonIssue) {
  const auto& r = testing_support::resources();
  const auto p = predict(trained(), r, "Başvuru", kRequestSentence);
  EXPECT_EQ(p.verdict, Verdict::NonIssue);
  EXPECT_EQ(p.matched_patterns, std::vector<std::string>{"NI_REQUEST"});
  EXPECT_GT(p.margin, 0);
  EXPECT_EQ(p.confidence, confidence(p.margin));
  EXPECT_EQ(p.gated, p.confidence < kDefaultThreshold);
  EXPECT_EQ(p.id, text_id(std::string("Başvuru\n") + kRequestSentence));

  const auto strict = predict(trained(), r, "Başvuru", kRequestSentence, "R-1", 0.9999);
  EXPECT_EQ(strict.id, "R-1");
  EXPECT_TRUE(strict.gated);
}

TEST(Predict, PatternsListedOncePerCodeInSentenceOrder) {
  const auto& r = testing_support::resources();
  const auto p = predict(trained(), r, "Kart neden kapandı?",
                         "Kayıt sehven açılmıştır. Kaydın silinmesini rica ederiz. Kaydın silinmesini rica ederiz.");
  EXPECT_EQ(p.matched_patterns, (std::vector<std::string>{"NI_WHY_QUESTION", "NI_INADVERTENTLY", "NI_REQUEST"}));
}

TEST(Settings, EnvironmentOverridesDefaults) {
  ::setenv("TRIAGE_PORT", "9123", 1);
  ::setenv("TRIAGE_MODEL", "/tmp/m.model", 1);
  ::setenv("TRIAGE_STORE", "/tmp/store", 1);
  ::setenv("TRIAGE_THRESHOLD", "0.5", 1);
  Settings s;
  apply_environment(s);
  EXPECT_EQ(s.port, 9123);
  EXPECT_EQ(s.model_path, "/tmp/m.model");
  EXPECT_EQ(s.store_path, "/tmp/store");
  EXPECT_EQ(s.threshold, 0.5);
  ::setenv("TRIAGE_THRESHOLD", "high", 1);
  EXPECT_THROW(apply_environment(s), ValidationError);
  for (const char* v : {"TRIAGE_PORT", "TRIAGE_MODEL", "TRIAGE_STORE", "TRIAGE_THRESHOLD"}) ::unsetenv(v);

  Settings d;
  apply_environment(d);
  EXPECT_EQ(d.port, 8080);
  EXPECT_EQ(d.threshold, kDefaultThreshold);
  d.threshold = 1.5;
  EXPECT_THROW(d.validate(), ValidationError);
}

TEST(Http, WithoutModelHealthAndPredictAre503) {
  const auto& r = testing_support::resources();
  const Api api(r, nullptr, nullptr, kDefaultThreshold);
  Running server(api);
  auto c = server.client();
  auto h = c.Get("/health");
  ASSERT_TRUE(h);
  EXPECT_EQ(h->status, 503);
  EXPECT_EQ(error_code(h), "model_not_loaded");
  auto p = post(c, "/predict", {{"summary", "x"}, {"description", "y"}});
  EXPECT_EQ(p->status, 503);
  EXPECT_EQ(c.Get("/reports/next")->status, 503);
  EXPECT_EQ(c.Get("/stats/distribution")->status, 503);
  EXPECT_EQ(c.Get("/patterns")->status, 200);
}

TEST(Http, PredictMatchesInProcessAndRejectsBadBodies) {
  const auto& r = testing_support::resources();
  TempDir dir;
  corpus::Store store(dir.path());
  store.add_reports({report("A-1", "Cards", "Başvuru", kRequestSentence)});
  const Api api(r, &trained(), &store, kDefaultThreshold);
  Running server(api);
  auto c = server.client();

  auto h = c.Get("/health");
  ASSERT_TRUE(h);
  EXPECT_EQ(h->status, 200);
  EXPECT_EQ(json::parse(h->body)["status"], "ok");

  auto p = post(c, "/predict", {{"summary", "Başvuru"}, {"description", kRequestSentence}});
  ASSERT_EQ(p->status, 200);
  const auto j = json::parse(p->body);
  const auto local = predict(trained(), r, "Başvuru", kRequestSentence);
  EXPECT_EQ(j["verdict"], "NonIssue");
  EXPECT_EQ(j["margin"].get<double>(), local.margin);
  EXPECT_EQ(j["id"], local.id);
  EXPECT_EQ(j["matched_patterns"], json::array({"NI_REQUEST"}));
  EXPECT_EQ(j["gated"], local.gated);

  auto by_id = post(c, "/predict", {{"report_id", "A-1"}});
  ASSERT_EQ(by_id->status, 200);
  EXPECT_EQ(json::parse(by_id->body)["id"], "A-1");
  EXPECT_EQ(json::parse(by_id->body)["margin"].get<double>(), local.margin);

  EXPECT_EQ(post(c, "/predict", {{"report_id", "nope"}})->status, 404);
  EXPECT_EQ(c.Post("/predict", "{not json", "application/json")->status, 400);
  EXPECT_EQ(post(c, "/predict", json::array({1, 2}))->status, 400);
  EXPECT_EQ(post(c, "/predict", {{"description", "only"}})->status, 400);
  auto bad = post(c, "/predict", {{"summary", 3}});
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(error_code(bad), "bad_request");
}

TEST(Http, PredictLeavesStoreUntouched) {
  const auto& r = testing_support::resources();
  TempDir dir;
  corpus::Store store(dir.path());
  store.add_reports({report("A-1", "Cards", "Kart", "Limit güncellenemedi."), report("A-2", "Cards", "Soru", "Neden?")});
  store.save_label({"A-2", Verdict::NonIssue, "NI_WHY_QUESTION", "ayse", 1700000100}, r.catalog);
  const auto reports_before = slurp(dir.path() / "reports.jsonl");
  const auto labels_before = slurp(dir.path() / "labels.jsonl");
  {
    const Api api(r, &trained(), &store, kDefaultThreshold);
    Running server(api);
    auto c = server.client();
    for (int i = 0; i < 10; ++i) {
      EXPECT_EQ(post(c, "/predict", {{"report_id", i % 2 ? "A-1" : "A-2"}})->status, 200);
      EXPECT_EQ(post(c, "/predict", {{"summary", "s"}, {"description", "Kart neden kapandı?"}})->status, 200);
    }
  }
  EXPECT_EQ(slurp(dir.path() / "reports.jsonl"), reports_before);
  EXPECT_EQ(slurp(dir.path() / "labels.jsonl"), labels_before);
  EXPECT_EQ(store.labeled_count(), 1u);
}

TEST(Http, LabelsEnforceStoreRules) {
  const auto& r = testing_support::resources();
  TempDir dir;
  corpus::Store store(dir.path());
  store.add_reports({report("B-1", "Cards", "Kart", "Kart açılamadı."), report("B-2", "Loans", "Kredi", kRequestSentence)});
  const Api api(r, nullptr, &store, kDefaultThreshold);
  Running server(api);
  auto c = server.client();

  auto conflict = post(c, "/labels", {{"report_id", "B-2"}, {"verdict", "NonIssue"}, {"labeler", "ayse"}});
  EXPECT_EQ(conflict->status, 409);
  EXPECT_EQ(error_code(conflict), "conflict");
  EXPECT_EQ(post(c, "/labels", {{"report_id", "B-1"}, {"verdict", "Issue"}, {"pattern_code", "NI_REQUEST"}})->status,
            409);
  EXPECT_EQ(post(c, "/labels", {{"report_id", "B-2"}, {"verdict", "NonIssue"}, {"pattern_code", "NI_OTHER"}})->status,
            409);
  EXPECT_EQ(post(c, "/labels", {{"report_id", "B-9"}, {"verdict", "Issue"}})->status, 404);
  EXPECT_EQ(post(c, "/labels", {{"report_id", "B-1"}, {"verdict", "Maybe"}})->status, 400);
  EXPECT_EQ(post(c, "/labels", {{"verdict", "Issue"}})->status, 400);
  EXPECT_EQ(post(c, "/labels", {{"report_id", "B-1"}, {"verdict", "Issue"}, {"labeled_at", "yesterday"}})->status,
            400);
  EXPECT_EQ(store.labeled_count(), 0u);

  auto ok = post(c, "/labels",
                 {{"report_id", "B-2"}, {"verdict", "NonIssue"}, {"pattern_code", "NI_REQUEST"}, {"labeler", "ayse"}});
  ASSERT_EQ(ok->status, 201);
  const auto saved = json::parse(ok->body);
  EXPECT_EQ(saved["pattern_code"], "NI_REQUEST");
  EXPECT_TRUE(corpus::parse_timestamp(saved["labeled_at"].get<std::string>()));
  EXPECT_EQ(store.active_label("B-2")->pattern_code, "NI_REQUEST");

  auto dist = json::parse(c.Get("/stats/distribution")->body);
  EXPECT_EQ(dist["totals"]["non_issue_count"], 1);
  EXPECT_EQ(dist["totals"]["issue_count"], 0);
  ASSERT_EQ(dist["rows"].size(), 1u);
  EXPECT_EQ(dist["rows"][0]["project"], "Loans");
}

TEST(Http, NextReportFollowsStrategy) {
  const auto& r = testing_support::resources();
  TempDir dir;
  corpus::Store store(dir.path());
  store.add_reports({report("C-2", "Beta", "b", "d"), report("C-1", "Alpha", "a", "d"), report("C-3", "Alpha", "c", "d")});
  const Api api(r, nullptr, &store, kDefaultThreshold);
  Running server(api);
  auto c = server.client();

  auto fifo = json::parse(c.Get("/reports/next?strategy=Fifo")->body);
  EXPECT_EQ(fifo["report"]["id"], "C-1");
  EXPECT_EQ(fifo["labeled"], 0);
  EXPECT_EQ(fifo["total"], 3);
  EXPECT_EQ(c.Get("/reports/next?strategy=Random")->status, 400);

  for (const char* id : {"C-1", "C-2", "C-3"})
    ASSERT_EQ(post(c, "/labels", {{"report_id", id}, {"verdict", "Issue"}})->status, 201);
  auto done = json::parse(c.Get("/reports/next")->body);
  EXPECT_TRUE(done["report"].is_null());
  EXPECT_EQ(done["labeled"], 3);
}

TEST(Http, PatternsListTheCatalog) {
  const auto& r = testing_support::resources();
  const Api api(r, nullptr, nullptr, kDefaultThreshold);
  Running server(api);
  auto c = server.client();
  const auto j = json::parse(c.Get("/patterns")->body)["patterns"];
  ASSERT_EQ(j.size(), 5u);
  EXPECT_EQ(j[0]["code"], "NI_REQUEST");
  EXPECT_EQ(j[0]["trigger_suffix"], "VerbalNoun+Possessive3sg");
  EXPECT_EQ(j[0]["trigger_roots"], json::array({"arşiv", "güncel", "sil"}));
  EXPECT_TRUE(j[3]["trigger_suffix"].is_null());
}

TEST(Http, ConcurrentPredictionsAgree) {
  const auto& r = testing_support::resources();
  const Api api(r, &trained(), nullptr, kDefaultThreshold);
  Running server(api);
  const auto corpus = small_corpus();
  std::vector<std::thread> workers;
  std::atomic<int> mismatches{0};
  for (int w = 0; w < 4; ++w)
    workers.emplace_back([&, w] {
      auto c = server.client();
      for (std::size_t i = static_cast<std::size_t>(w); i < 40; i += 4) {
        const auto& rep = corpus[i].report;
        auto res = post(c, "/predict", {{"summary", rep.summary}, {"description", rep.description}});
        const auto local = predict(trained(), r, rep.summary, rep.description);
        if (!res || res->status != 200 || json::parse(res->body)["margin"].get<double>() != local.margin) ++mismatches;
      }
    });
  for (auto& t : workers) t.join();
  EXPECT_EQ(mismatches, 0);
}
