// mvver: command-line front end for dataset curation by multi-view voting
// and entropy ranking.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mvver/config_io.hpp"
#include "mvver/dataset.hpp"
#include "mvver/entropy.hpp"
#include "mvver/error.hpp"
#include "mvver/harness.hpp"
#include "mvver/refine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

struct ClassifierFlags {
  std::optional<std::string> kind;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<int> hidden;
  std::optional<double> lr;
  std::optional<double> l2;

  void add_to(CLI::App* app) {
    app->add_option("--classifier", kind, "softmax | mlp");
    app->add_option("--epochs", epochs);
    app->add_option("--batch-size", batch_size);
    app->add_option("--hidden", hidden, "hidden units (mlp)");
    app->add_option("--lr", lr, "Adam learning rate");
    app->add_option("--l2", l2, "weight decay");
  }

  void apply(mvver::ClassifierConfig& c) const {
    if (kind) c.kind = mvver::parse_model_kind(*kind);
    if (epochs) c.epochs = *epochs;
    if (batch_size) c.batch_size = *batch_size;
    if (hidden) c.hidden_units = *hidden;
    if (lr) c.learning_rate = *lr;
    if (l2) c.l2 = *l2;
    c.validate();
  }
};

fs::path out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

json load_json_config(const Globals& g) {
  const auto text = mvver::read_text_file(g.config);
  try {
    return json::parse(text);
  } catch (const json::exception& ex) {
    throw mvver::Error(mvver::ErrorCode::parse_error, g.config + ": " + ex.what());
  }
}

std::string ids_csv(const std::vector<mvver::SampleId>& ids) {
  std::string out = "id\n";
  for (auto id : ids) out += std::to_string(id) + "\n";
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

int fail(mvver::ErrorCode code, const std::string& message) {
  json err{{"error", {{"code", mvver::to_string(code)}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mvver: clean noisy-label datasets by multi-view voting and entropy ranking"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "seed (overrides the config)");
  app.add_option("--out-dir", g.out_dir, "output directory");

  // gen-blobs
  auto* gen = app.add_subcommand("gen-blobs", "generate Gaussian blobs as CSV");
  mvver::BlobsSpec blobs;
  std::string gen_out = "blobs.csv";
  gen->add_option("--classes", blobs.num_classes);
  gen->add_option("--per-class", blobs.per_class);
  gen->add_option("--dim", blobs.dim);
  gen->add_option("--separation", blobs.separation);
  gen->add_option("--spread", blobs.spread);
  gen->add_option("--out", gen_out, "file name inside --out-dir");

  // inject
  auto* inject = app.add_subcommand("inject", "inject class-balanced label noise");
  std::string inject_in;
  double ratio = 0.0;
  inject->add_option("--in", inject_in)->required()->check(CLI::ExistingFile);
  inject->add_option("--ratio", ratio)->required();

  // curate
  auto* curate = app.add_subcommand("curate", "run iterative voting + entropy refinement");
  std::string curate_in, curate_truth, alpha_sweep;
  std::optional<int> iterations, views;
  std::optional<double> alpha;
  ClassifierFlags curate_clf;
  curate->add_option("--in", curate_in, "noisy training CSV")->required()->check(CLI::ExistingFile);
  curate->add_option("--truth", curate_truth, "clean labels (CSV, same rows) for purity")
      ->check(CLI::ExistingFile);
  curate->add_option("--iterations,-M", iterations);
  curate->add_option("--views,-n", views);
  curate->add_option("--alpha", alpha, "entropy threshold in nats (negative disables)");
  curate->add_option("--alpha-sweep", alpha_sweep, "comma-separated candidate thresholds");
  curate_clf.add_to(curate);

  // train
  auto* train_cmd = app.add_subcommand("train", "train a classifier on a CSV dataset");
  std::string train_in, model_out = "model.json";
  ClassifierFlags train_clf;
  train_cmd->add_option("--in", train_in)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--model-out", model_out, "file name inside --out-dir");
  train_clf.add_to(train_cmd);

  // eval
  auto* eval = app.add_subcommand("eval", "overall accuracy of a model on a labelled CSV");
  std::string eval_model, eval_in;
  eval->add_option("--model", eval_model)->required()->check(CLI::ExistingFile);
  eval->add_option("--in", eval_in)->required()->check(CLI::ExistingFile);

  // experiment
  auto* experiment = app.add_subcommand("experiment", "repeated noisy-label experiment");

  // entropy-hist
  auto* hist = app.add_subcommand("entropy-hist", "entropy histogram of model predictions");
  std::string hist_model, hist_in;
  int bins = 20;
  hist->add_option("--model", hist_model)->required()->check(CLI::ExistingFile);
  hist->add_option("--in", hist_in)->required()->check(CLI::ExistingFile);
  hist->add_option("--bins", bins);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(mvver::ErrorCode::invalid_argument, e.what());
  }

  try {
    if (*gen) {
      if (g.seed) blobs.seed = *g.seed;
      const auto ds = mvver::make_blobs(blobs).data;
      mvver::save_csv(ds, out_path(g, gen_out));
    } else if (*inject) {
      const auto ds = mvver::load_csv(inject_in);
      const auto noisy = mvver::inject_noise(ds, {ratio, g.seed.value_or(0)});
      mvver::save_csv(noisy.data, out_path(g, "noisy.csv"));
      mvver::write_text_file(out_path(g, "ledger.json"), mvver::ledger_to_json(noisy.ledger) + "\n");
      std::cout << json{{"flipped", noisy.ledger.size()}, {"samples", noisy.data.size()}}.dump()
                << '\n';
    } else if (*curate) {
      mvver::RefineConfig cfg;
      if (!g.config.empty()) {
        const auto j = load_json_config(g);
        cfg = j.contains("refine") ? mvver::experiment_from_json(j).refine
                                   : mvver::refine_from_json(j);
      }
      if (iterations) cfg.iterations = *iterations;
      if (views) cfg.views = *views;
      if (alpha) cfg.alpha = *alpha;
      curate_clf.apply(cfg.view_classifier);
      curate_clf.apply(cfg.strong_classifier);
      curate_clf.apply(cfg.final_classifier);
      if (g.seed) cfg.seed = *g.seed;

      const auto ds = mvver::load_csv(curate_in);
      std::optional<mvver::LabeledDataset> truth;
      if (!curate_truth.empty()) truth = mvver::load_csv(curate_truth);
      mvver::RefineOptions options;
      options.keep_audit = true;
      if (truth) options.clean_truth = &*truth;

      const auto result = mvver::run_refinement(ds, cfg, options);
      mvver::save_csv(result.curated, out_path(g, "curated.csv"));
      mvver::write_text_file(out_path(g, "curated_ids.csv"), ids_csv(result.curated.ids()));
      std::vector<mvver::SampleId> weak_ids;
      for (const auto& w : result.final_weak) weak_ids.push_back(w.id);
      mvver::write_text_file(out_path(g, "weak_ids.csv"), ids_csv(weak_ids));
      mvver::write_text_file(out_path(g, "recovered_ids.csv"), ids_csv(result.recovered_ids));

      json reports = json::array();
      for (std::size_t m = 0; m < result.reports.size(); ++m) {
        reports.push_back(mvver::to_json(result.reports[m]));
        const auto& audit = result.audits[m];
        const std::string tag = "_m" + std::to_string(m + 1);
        mvver::write_text_file(out_path(g, "votes" + tag + ".csv"), audit.votes.to_csv());
        mvver::write_text_file(out_path(g, "entropy" + tag + ".csv"),
                               mvver::records_to_csv(audit.entropy));
        mvver::write_text_file(out_path(g, "strong_ids" + tag + ".csv"), ids_csv(audit.strong_ids));
        mvver::write_text_file(out_path(g, "weak_ids" + tag + ".csv"), ids_csv(audit.weak_ids));
        const auto h = mvver::entropy_histogram(audit.entropy, 20, ds.num_classes, cfg.unit);
        mvver::write_text_file(out_path(g, "entropy_hist" + tag + ".json"),
                               mvver::histogram_to_json(h) + "\n");
      }
      json summary{{"config", mvver::to_json(cfg)},
                   {"iterations", reports},
                   {"curated_size", result.curated.size()},
                   {"weak_size", result.final_weak.size()}};
      mvver::write_text_file(out_path(g, "iterations.json"), summary.dump(2) + "\n");

      mvver::ClassifierConfig final_cfg = cfg.final_classifier;
      final_cfg.seed = cfg.seed;
      const auto model = mvver::train_final(result.curated, final_cfg);
      mvver::write_text_file(out_path(g, "model.json"), mvver::model_to_json(model) + "\n");

      if (!alpha_sweep.empty()) {
        const auto alphas = parse_list(alpha_sweep);
        json sweep = json::array();
        for (const auto& c : mvver::sweep_alpha(ds, cfg, alphas))
          sweep.push_back({{"alpha", c.alpha},
                           {"holdout_accuracy", c.holdout_accuracy},
                           {"curated_size", c.curated_size}});
        mvver::write_text_file(out_path(g, "alpha_sweep.json"), sweep.dump(2) + "\n");
      }
      std::cout << summary["iterations"].dump() << '\n';
    } else if (*train_cmd) {
      mvver::ClassifierConfig cfg;
      if (!g.config.empty()) cfg = mvver::classifier_from_json(load_json_config(g));
      train_clf.apply(cfg);
      if (g.seed) cfg.seed = *g.seed;
      const auto ds = mvver::load_csv(train_in);
      const auto model = mvver::fit(ds, cfg);
      mvver::write_text_file(out_path(g, model_out), mvver::model_to_json(model) + "\n");
    } else if (*eval) {
      const auto model = mvver::model_from_json(mvver::read_text_file(eval_model));
      const auto test = mvver::load_csv(eval_in);
      std::cout << json{{"accuracy", mvver::evaluate(model, test)}, {"samples", test.size()}}.dump()
                << '\n';
    } else if (*experiment) {
      mvver::ExperimentConfig cfg;
      if (!g.config.empty()) cfg = mvver::experiment_from_json(load_json_config(g));
      if (g.seed) cfg.seed = *g.seed;
      const auto report = mvver::run_experiment(cfg);
      mvver::write_text_file(out_path(g, "report.json"), mvver::report_to_json(report, cfg));
      mvver::write_text_file(out_path(g, "results.csv"), mvver::report_to_csv(report));
      std::cout << mvver::report_to_csv(report);
    } else if (*hist) {
      const auto model = mvver::model_from_json(mvver::read_text_file(hist_model));
      const auto ds = mvver::load_csv(hist_in);
      std::vector<mvver::WeakSample> rows;
      for (const auto& s : ds.samples) rows.push_back({s.id, s.features, s.label});
      const auto records = mvver::rank_weak(model, rows);
      const auto h = mvver::entropy_histogram(records, bins, model.num_classes);
      mvver::write_text_file(out_path(g, "entropy_hist.json"), mvver::histogram_to_json(h) + "\n");
      mvver::write_text_file(out_path(g, "entropy_hist.csv"), mvver::histogram_to_csv(h));
      mvver::write_text_file(out_path(g, "entropy_records.csv"), mvver::records_to_csv(records));
      std::cout << mvver::histogram_to_json(h) << '\n';
    }
  } catch (const mvver::Error& e) {
    return fail(e.code(), e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(mvver::ErrorCode::io_error, e.what());
  } catch (const std::exception& e) {
    return fail(mvver::ErrorCode::invalid_argument, e.what());
  }
  return 0;
}
