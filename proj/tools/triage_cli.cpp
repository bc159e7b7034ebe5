// triage: analyze words, match patterns, generate corpora, train, evaluate,
// predict and serve the labeling API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"

#include "triage/classifier.hpp"
#include "triage/corpus.hpp"
#include "triage/evaluation.hpp"
#include "triage/resources.hpp"
#include "triage/service.hpp"

using namespace triage;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  if (path != "-") return morph::Lexicon::read_file(path);
  return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out.flush()) throw Error("write to " + path + " failed");
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

struct TrainOptions {
  double C = 1.0;
  std::uint64_t seed = 0;
  int max_epochs = 1000;
  double tolerance = 1e-4;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--C", C, "SVM cost parameter")->capture_default_str();
    cmd->add_option("--train-seed", seed, "solver shuffle seed")->capture_default_str();
    cmd->add_option("--max-epochs", max_epochs)->capture_default_str();
    cmd->add_option("--tolerance", tolerance, "relative objective decrease that stops training")->capture_default_str();
  }

  model::TrainConfig config() const {
    model::TrainConfig c;
    c.C = C;
    c.seed = seed;
    c.max_epochs = max_epochs;
    c.tolerance = tolerance;
    c.validate();
    return c;
  }
};

void split(const std::vector<corpus::LabeledReport>& corpus, std::vector<std::string>& texts,
           std::vector<Verdict>& labels) {
  for (const auto& lr : corpus) {
    texts.push_back(lr.report.text());
    labels.push_back(lr.label.verdict);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-issue triage for Turkish issue reports"};
  app.require_subcommand(1);
  std::string data_dir = triage::data_dir();
  app.add_option("--data-dir", data_dir, "directory with lexicon, suffixes, catalog and stopwords")
      ->capture_default_str();

  service::Settings settings;

  auto* analyze = app.add_subcommand("analyze", "print every morphological analysis of a word, best first");
  std::string word;
  analyze->add_option("word", word)->required();

  auto* match = app.add_subcommand("match", "list the discourse patterns firing in a text file (- for stdin)");
  std::string match_file;
  match->add_option("file", match_file)->required();

  auto* gen = app.add_subcommand("gen", "generate a labeled synthetic corpus");
  corpus::GeneratorConfig gen_config;
  std::string gen_out;
  gen->add_option("--n", gen_config.n, "number of reports")->capture_default_str();
  gen->add_option("--prevalence", gen_config.prevalence, "fraction of NonIssue reports")->capture_default_str();
  gen->add_option("--pattern-free", gen_config.pattern_free_fraction,
                  "fraction of NonIssue reports written without any catalog pattern")
      ->capture_default_str();
  gen->add_option("--seed", gen_config.seed)->capture_default_str();
  gen->add_option("--out", gen_out, "output file (default stdout)");

  auto* train = app.add_subcommand("train", "train a classifier on a labeled corpus");
  std::string train_corpus, train_features = "all", train_out;
  bool drop_digits = false;
  TrainOptions train_opts;
  train->add_option("--corpus", train_corpus)->required();
  train->add_option("--features", train_features, "extractors, e.g. ngrams+ma+patterns")->capture_default_str();
  train->add_option("--out", train_out, "model file")->required();
  train->add_flag("--drop-digit-tokens", drop_digits, "ignore all-digit tokens in n-grams");
  train_opts.add_to(train);

  auto* eval = app.add_subcommand("eval", "cross-validate every extractor subset and print the ablation table");
  std::string eval_corpus, eval_out, eval_records;
  eval::CvOptions cv;
  std::vector<std::string> eval_subsets;
  bool eval_drop_digits = false;
  TrainOptions eval_train;
  eval->add_option("--corpus", eval_corpus)->required();
  eval->add_option("--k", cv.k, "number of folds")->capture_default_str();
  eval->add_option("--seed", cv.seed, "fold assignment seed")->capture_default_str();
  eval->add_option("--threads", cv.threads, "parallel folds, 0 = all cores")->capture_default_str();
  eval->add_option("--subset", eval_subsets, "restrict to these extractor subsets (repeatable)");
  eval->add_option("--out", eval_out, "also write the table to this file");
  eval->add_option("--records", eval_records, "write per-fold metrics as JSON lines");
  eval->add_flag("--drop-digit-tokens", eval_drop_digits, "ignore all-digit tokens in n-grams");
  eval_train.add_to(eval);

  auto* predict = app.add_subcommand("predict", "classify reports, one JSON line per report");
  std::string predict_in, predict_summary, predict_description, predict_out;
  predict->add_option("--model", settings.model_path, "model file (or TRIAGE_MODEL)");
  auto* in_opt = predict->add_option("--in", predict_in, "report file (JSON lines, - for stdin)");
  auto* summary_opt = predict->add_option("--summary", predict_summary, "classify one inline report");
  predict->add_option("--description", predict_description)->needs(summary_opt);
  in_opt->excludes(summary_opt);
  predict->add_option("--threshold", settings.threshold, "confidence below which NonIssue is gated");
  predict->add_option("--out", predict_out, "output file (default stdout)");

  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  serve->add_option("--model", settings.model_path, "model file (or TRIAGE_MODEL)");
  serve->add_option("--store", settings.store_path, "label store directory (or TRIAGE_STORE)");
  serve->add_option("--host", settings.host);
  serve->add_option("--port", settings.port, "0 picks a free port (or TRIAGE_PORT)");
  serve->add_option("--threshold", settings.threshold, "(or TRIAGE_THRESHOLD)");

  auto* stats = app.add_subcommand("stats", "print the per-project label distribution of a store");
  std::string stats_store;
  bool stats_json = false;
  stats->add_option("--store", stats_store)->required();
  stats->add_flag("--json", stats_json, "print the JSON document the HTTP API serves");

  auto* ingest = app.add_subcommand("ingest", "add a report file to a store; labels in it are kept");
  std::string ingest_store, ingest_in;
  ingest->add_option("--store", ingest_store)->required();
  ingest->add_option("--in", ingest_in, "report file (- for stdin)")->required();

  try {
    service::apply_environment(settings);
  } catch (const Error& e) {
    std::cerr << "triage: " << e.what() << "\n";
    return 1;
  }

  try {
    app.parse(argc, argv);
    if (predict->parsed() && settings.model_path.empty()) throw UsageError("predict needs --model or TRIAGE_MODEL");
    if (predict->parsed() && predict_in.empty() && !*summary_opt) throw UsageError("predict needs --in or --summary");
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "triage: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "triage: " << e.what() << "\n\n" << predict->help();
    return 2;
  }

  try {
    if (analyze->parsed()) {
      const auto res = Resources::load(data_dir);
      const auto all = res.analyzer.analyze(word);
      if (all.empty()) std::cerr << "triage: no analysis for '" << word << "'\n";
      for (const auto& a : all)
        std::cout << a.root << '\t' << to_string(a.pos) << '\t' << morph::tags_to_string(a.tags) << '\t'
                  << join(a.segmentation, "+") << '\n';
    } else if (match->parsed()) {
      const auto res = Resources::load(data_dir);
      for (const auto& m : patterns::match_patterns(read_input(match_file), res.catalog, res.analyzer)) {
        nlohmann::ordered_json ev = nlohmann::ordered_json::array();
        for (const auto& e : m.evidence) ev.push_back({{"token", e.token}, {"reason", patterns::to_string(e.reason)}});
        std::cout << nlohmann::ordered_json{{"code", m.code}, {"sentence", m.sentence_index}, {"evidence", ev}}.dump()
                  << '\n';
      }
    } else if (gen->parsed()) {
      write_output(gen_out, corpus::write_labeled(corpus::generate_synthetic(gen_config)));
    } else if (train->parsed()) {
      const auto res = Resources::load(data_dir);
      std::vector<std::string> texts;
      std::vector<Verdict> labels;
      split(corpus::load_labeled(train_corpus), texts, labels);
      auto config = res.config(features::ExtractorSet::parse(train_features));
      config.drop_digit_tokens = drop_digits;
      model::TrainTrace trace;
      model::TrainConfig tc = train_opts.config();
      std::vector<features::FeatureBag> bags;
      for (const auto& t : texts) bags.push_back(features::compose(t, config, res.handles()));
      const Classifier classifier(config, fit(bags, labels, tc, &trace));
      classifier.save(train_out);
      std::cerr << "trained on " << texts.size() << " reports, vocabulary " << classifier.vocabulary().size()
                << ", " << trace.epochs << " epochs" << (trace.converged ? "" : " (epoch limit reached)") << '\n';
    } else if (eval->parsed()) {
      const auto res = Resources::load(data_dir);
      std::vector<std::string> texts;
      std::vector<Verdict> labels;
      split(corpus::load_labeled(eval_corpus), texts, labels);
      std::vector<features::ExtractorSet> subsets;
      for (const auto& s : eval_subsets) subsets.push_back(features::ExtractorSet::parse(s));
      if (subsets.empty()) subsets = features::ExtractorSet::ablation_order();
      auto config = res.config();
      config.drop_digit_tokens = eval_drop_digits;
      cv.train = eval_train.config();
      const auto rows = eval::cross_validate(texts, labels, subsets, config, res.handles(), cv);
      const auto table = eval::format_table(rows);
      std::cout << table;
      if (!eval_out.empty()) write_output(eval_out, table);
      if (!eval_records.empty()) write_output(eval_records, eval::format_records(rows));
    } else if (predict->parsed()) {
      settings.validate();
      const auto res = Resources::load(data_dir);
      const auto classifier = Classifier::load(settings.model_path);
      std::string out;
      auto emit = [&](const std::string& s, const std::string& d, std::optional<std::string> id) {
        out += service::to_json(service::predict(classifier, res, s, d, std::move(id), settings.threshold)).dump();
        out += '\n';
      };
      if (!predict_in.empty()) {
        for (const auto& [r, label] : corpus::read_report_file(read_input(predict_in), predict_in, false))
          emit(r.summary, r.description, r.id);
      } else {
        emit(predict_summary, predict_description, std::nullopt);
      }
      write_output(predict_out, out);
    } else if (serve->parsed()) {
      settings.validate();
      const auto res = Resources::load(data_dir);
      std::optional<Classifier> classifier;
      std::optional<corpus::Store> store;
      if (!settings.model_path.empty()) classifier = Classifier::load(settings.model_path);
      if (!settings.store_path.empty()) store.emplace(settings.store_path);
      if (!classifier) std::cerr << "triage: no model given; /predict and /health answer 503\n";
      const service::Api api(res, classifier ? &*classifier : nullptr, store ? &*store : nullptr, settings.threshold);
      httplib::Server server;
      api.mount(server);
      int port = settings.port;
      if (port == 0) port = server.bind_to_any_port(settings.host);
      else if (!server.bind_to_port(settings.host, port)) port = -1;
      if (port < 0) throw Error("cannot bind " + settings.host + ":" + std::to_string(settings.port));
      std::cout << "listening on http://" << settings.host << ':' << port << std::endl;
      if (!server.listen_after_bind()) throw Error("server stopped unexpectedly");
    } else if (stats->parsed()) {
      const corpus::Store store(stats_store);
      const auto d = store.distribution();
      std::cout << (stats_json ? corpus::to_json(d).dump(2) + "\n" : corpus::format_distribution(d));
    } else if (ingest->parsed()) {
      const auto res = Resources::load(data_dir);
      corpus::Store store(ingest_store);
      const auto records = corpus::read_report_file(read_input(ingest_in), ingest_in, false);
      std::vector<corpus::IssueReport> reports;
      for (const auto& [r, label] : records) {
        if (label) corpus::check_label(*label, &res.catalog);
        reports.push_back(r);
      }
      store.add_reports(reports);
      std::size_t labels = 0;
      for (const auto& [r, label] : records)
        if (label) {
          store.save_label(*label, res.catalog);
          ++labels;
        }
      std::cerr << "added " << reports.size() << " reports and " << labels << " labels\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "triage: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
