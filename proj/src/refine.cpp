#include "mvver/refine.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "mvver/error.hpp"
#include "mvver/kernels.hpp"
#include "mvver/rng.hpp"

namespace mvver {

namespace {

constexpr std::uint64_t kViewsStage = 1;
constexpr std::uint64_t kStrongStage = 2;

double accuracy_on(const Model& model, const LabeledDataset& test) {
  const auto pred = kernels::predict_labels(model, kernels::rows_of(test.samples));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == test.samples[i].label;
  return static_cast<double>(hits) / static_cast<double>(test.size());
}

Error tagged(const Error& e, int iteration) {
  return Error(e.code(), "iteration " + std::to_string(iteration) + ": " + e.what());
}

}  // namespace

void RefineConfig::validate() const {
  if (iterations < 1) throw Error(ErrorCode::invalid_argument, "iterations (M) must be >= 1");
  if (views < 2) throw Error(ErrorCode::invalid_argument, "views (n) must be >= 2");
  if (std::isnan(alpha)) throw Error(ErrorCode::invalid_argument, "alpha is NaN");
  view_classifier.validate();
  strong_classifier.validate();
  final_classifier.validate();
}

double label_agreement(const LabeledDataset& labeled, const LabeledDataset& truth) {
  if (labeled.empty()) throw Error(ErrorCode::empty_dataset, "label_agreement: empty dataset");
  std::unordered_map<SampleId, ClassLabel> truth_label;
  for (const auto& s : truth.samples) truth_label.emplace(s.id, s.label);
  std::size_t agree = 0;
  for (const auto& s : labeled.samples) {
    auto it = truth_label.find(s.id);
    if (it == truth_label.end())
      throw Error(ErrorCode::id_mismatch, "sample " + std::to_string(s.id) + " not in truth set");
    agree += it->second == s.label;
  }
  return static_cast<double>(agree) / static_cast<double>(labeled.size());
}

IterationOutcome run_iteration(const LabeledDataset& input, std::vector<WeakSample> carried_weak,
                               const RefineConfig& cfg, int iteration) {
  const auto m = static_cast<std::uint64_t>(iteration);
  if (input.empty()) throw Error(ErrorCode::empty_dataset, "input strong set is empty");

  IterationOutcome out;
  const auto models =
      train_views(input, cfg.views, cfg.view_classifier, derive_seed(cfg.seed, {m, kViewsStage}));
  out.votes = vote(models, input);
  CurationState voted = partition(input, out.votes, std::move(carried_weak), cfg.strong_label);
  out.strong_after_vote = voted.strong.size();

  const std::size_t minimum =
      static_cast<std::size_t>(cfg.views) * static_cast<std::size_t>(input.num_classes);
  if (voted.strong.size() < minimum)
    throw Error(ErrorCode::class_too_small,
                "strong set after voting has " + std::to_string(voted.strong.size()) +
                    " samples, fewer than n*C = " + std::to_string(minimum));

  ClassifierConfig strong_cfg = cfg.strong_classifier;
  strong_cfg.seed = derive_seed(cfg.seed, {m, kStrongStage});
  out.strong_model = fit(voted.strong, strong_cfg);

  out.entropy = rank_weak(out.strong_model, voted.weak, cfg.unit);
  auto recovered = recover(voted, out.entropy, RecoveryConfig{cfg.alpha, cfg.unit});
  out.state = std::move(recovered.state);
  out.recovered = std::move(recovered.recovered);
  out.state.check_invariants();
  return out;
}

RefinementResult run_refinement(const LabeledDataset& ds, const RefineConfig& cfg,
                                const RefineOptions& options) {
  cfg.validate();
  ds.validate();
  if (ds.empty()) throw Error(ErrorCode::empty_dataset, "refinement: empty dataset");

  RefinementResult result;
  LabeledDataset current = ds;
  std::vector<WeakSample> weak;
  std::set<SampleId> recovered_ids;
  std::set<SampleId> ever_weak;

  for (int m = 1; m <= cfg.iterations; ++m) {
    IterationOutcome it;
    try {
      it = run_iteration(current, std::move(weak), cfg, m);
    } catch (const Error& e) {
      throw tagged(e, m);
    }
    if (it.state.total != ds.size())
      throw Error(ErrorCode::id_mismatch,
                  "iteration " + std::to_string(m) + ": strong + weak != N");

    IterationReport report;
    report.iteration = m;
    report.input_size = current.size();
    report.strong_after_vote = it.strong_after_vote;
    report.demoted = current.size() - it.strong_after_vote;
    report.recovered = it.recovered.size();
    report.strong_size = it.state.strong.size();
    report.weak_size = it.state.weak.size();
    if (options.clean_truth && !it.state.strong.empty())
      report.purity = label_agreement(it.state.strong, *options.clean_truth);
    if (options.test && !options.test->empty())
      report.strong_model_accuracy = accuracy_on(it.strong_model, *options.test);
    result.reports.push_back(report);

    for (const auto& w : it.state.weak) {
      ever_weak.insert(w.id);
      recovered_ids.erase(w.id);
    }
    for (SampleId id : it.recovered) {
      ever_weak.insert(id);
      recovered_ids.insert(id);
    }

    if (options.keep_audit) {
      IterationAudit audit;
      audit.votes = it.votes;
      audit.entropy = it.entropy;
      audit.strong_ids = it.state.strong.ids();
      for (const auto& w : it.state.weak) audit.weak_ids.push_back(w.id);
      result.audits.push_back(std::move(audit));
    }

    current = std::move(it.state.strong);
    weak = std::move(it.state.weak);
  }

  result.curated = std::move(current);
  result.final_weak = std::move(weak);
  result.recovered_ids.assign(recovered_ids.begin(), recovered_ids.end());
  result.ever_weak_ids.assign(ever_weak.begin(), ever_weak.end());
  return result;
}

Model train_final(const LabeledDataset& curated, const ClassifierConfig& cfg) {
  if (curated.empty()) throw Error(ErrorCode::empty_dataset, "train_final: curated set is empty");
  const auto counts = curated.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] == 0)
      throw Error(ErrorCode::class_too_small,
                  "train_final: class " + std::to_string(c) + " is missing from the curated set");
  return fit(curated, cfg);
}

}  // namespace mvver
