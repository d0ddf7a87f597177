#pragma once

#include <optional>
#include <vector>

#include "mvver/classifier.hpp"
#include "mvver/dataset.hpp"
#include "mvver/entropy.hpp"
#include "mvver/voting.hpp"

namespace mvver {

struct RefineConfig {
  int iterations = 3;  // M
  int views = 2;       // n
  double alpha = 1.5;  // negative disables entropy recovery
  EntropyUnit unit = EntropyUnit::nats;
  StrongLabel strong_label = StrongLabel::voted;
  ClassifierConfig view_classifier;
  ClassifierConfig strong_classifier;
  ClassifierConfig final_classifier;
  std::uint64_t seed = 0;

  void validate() const;
};

struct IterationReport {
  int iteration = 0;
  std::size_t input_size = 0;         // |D_m|
  std::size_t strong_after_vote = 0;  // |D^s| before recovery
  std::size_t demoted = 0;            // non-unanimous samples of D_m
  std::size_t recovered = 0;
  std::size_t strong_size = 0;  // |D^s_m|
  std::size_t weak_size = 0;    // |D^w_m|
  std::optional<double> purity;                 // needs clean truth
  std::optional<double> strong_model_accuracy;  // needs a test set
};

/// Per-iteration artifacts kept when RefineOptions::keep_audit is set.
struct IterationAudit {
  VoteTable votes;
  std::vector<EntropyRecord> entropy;
  std::vector<SampleId> strong_ids;
  std::vector<SampleId> weak_ids;
};

struct RefineOptions {
  const LabeledDataset* clean_truth = nullptr;  // for purity
  const LabeledDataset* test = nullptr;         // for strong-model accuracy
  bool keep_audit = false;
};

struct RefinementResult {
  LabeledDataset curated;  // D^s_M
  std::vector<WeakSample> final_weak;
  std::vector<IterationReport> reports;
  std::vector<SampleId> recovered_ids;  // in curated, entered the strong set via recovery
  std::vector<SampleId> ever_weak_ids;
  std::vector<IterationAudit> audits;
};

/// One vote-partition-recover pass. `input` is D_m, `carried_weak` is D^w_{m-1}.
struct IterationOutcome {
  CurationState state;  // after recovery
  std::size_t strong_after_vote = 0;
  std::vector<SampleId> recovered;
  VoteTable votes;
  std::vector<EntropyRecord> entropy;
  Model strong_model;
};

IterationOutcome run_iteration(const LabeledDataset& input, std::vector<WeakSample> carried_weak,
                               const RefineConfig& cfg, int iteration);

/// M iterations with D_{m+1} = D^s_m and the weak set carried across
/// iterations. Deterministic in cfg.seed; each (iteration, stage) has its own
/// RNG stream. Errors are prefixed with the failing iteration.
RefinementResult run_refinement(const LabeledDataset& ds, const RefineConfig& cfg,
                                const RefineOptions& options = {});

/// Final model on the curated set. Every class must be represented.
Model train_final(const LabeledDataset& curated, const ClassifierConfig& cfg);

/// Fraction of `labeled` whose label equals the label of the same id in `truth`.
double label_agreement(const LabeledDataset& labeled, const LabeledDataset& truth);

}  // namespace mvver
