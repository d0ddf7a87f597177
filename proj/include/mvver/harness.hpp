#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mvver/classifier.hpp"
#include "mvver/dataset.hpp"
#include "mvver/refine.hpp"

namespace mvver {

/// Fraction of `test` samples whose predicted class equals their label.
double evaluate(const Model& model, const LabeledDataset& test);

struct CurationMetrics {
  double purity = 0.0;               // curated labels equal to ground truth
  double recovery_precision = 0.0;   // recovered samples carrying the true label
  double recovery_recall = 0.0;      // correctly recovered / ever demoted to weak
  std::size_t recovered = 0;
  std::size_t residual_corrupted = 0;  // curated samples still carrying their injected label
};

/// `recovered_ids` and `ever_weak_ids` come from RefinementResult. Precision
/// and recall are 0 when their denominator is empty.
CurationMetrics curation_metrics(const NoiseLedger& ledger, const LabeledDataset& clean_truth,
                                 const LabeledDataset& curated,
                                 std::span<const SampleId> recovered_ids,
                                 std::span<const SampleId> ever_weak_ids);

struct Interval {
  double mean = 0.0;
  double half_width = 0.0;  // Student-t, 95%, k-1 degrees of freedom
};

/// Sample mean and 95% Student-t half-width. Needs at least two values.
Interval aggregate(std::span<const double> values);

/// Two-sided 95% Student-t critical value t_{0.975, dof}.
double student_t_975(int dof);

struct CsvSource {
  std::filesystem::path path;
};
using DataSource = std::variant<BlobsSpec, CsvSource>;

struct Baselines {
  bool naive = true;
  bool voting_only = true;
};

struct ExperimentConfig {
  DataSource data = BlobsSpec{};
  std::vector<double> noise_ratios{0.1, 0.2, 0.3, 0.4, 0.5};
  int repeats = 10;
  double test_fraction = 0.5;
  Baselines baselines;
  RefineConfig refine;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CellResult {
  double ratio = 0.0;
  int repeat = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t flipped = 0;
  double full_accuracy = 0.0;
  std::optional<double> naive_accuracy;
  std::optional<double> voting_only_accuracy;
  std::vector<IterationReport> iterations;
  CurationMetrics metrics;
  std::size_t curated_size = 0;
};

struct MethodSummary {
  double mean = 0.0;
  std::optional<double> ci95;  // absent with a single repeat
};

struct RatioSummary {
  double ratio = 0.0;
  MethodSummary full;
  std::optional<MethodSummary> naive;
  std::optional<MethodSummary> voting_only;
  MethodSummary purity;
};

struct RunReport {
  std::vector<CellResult> cells;  // ordered by (ratio, repeat)
  std::vector<RatioSummary> summary;
};

/// One (ratio, repeat) cell: stratified train/test split of the clean data,
/// noise on the training half only, refinement, baselines, clean evaluation.
CellResult run_cell(const LabeledDataset& clean, const ExperimentConfig& cfg,
                    std::size_t ratio_index, int repeat);

/// All cells (in parallel when OpenMP allows) merged in (ratio, repeat) order.
RunReport run_experiment(const ExperimentConfig& cfg);
RunReport run_experiment(const ExperimentConfig& cfg, const LabeledDataset& clean);

LabeledDataset load_source(const DataSource& source);

std::string report_to_json(const RunReport& report, const ExperimentConfig& cfg);
/// Table layout: ratio, naive, voting-only, full method, each with its CI.
std::string report_to_csv(const RunReport& report);

struct AlphaCandidate {
  double alpha = 0.0;
  double holdout_accuracy = 0.0;
  std::size_t curated_size = 0;
};

/// Scores candidate thresholds by the accuracy of the final model on a
/// holdout carved (stratified) from the voting-only strong set, whose labels
/// are the unanimous votes. The choice of alpha is left to the caller.
std::vector<AlphaCandidate> sweep_alpha(const LabeledDataset& noisy_train,
                                        const RefineConfig& cfg,
                                        std::span<const double> alphas,
                                        double holdout_fraction = 0.2);

}  // namespace mvver
