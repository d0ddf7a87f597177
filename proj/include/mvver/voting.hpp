#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvver/classifier.hpp"
#include "mvver/dataset.hpp"

namespace mvver {

/// A sample whose label was stripped by a non-unanimous vote. `audit_label`
/// is the label it had when demoted; it feeds metrics only and the curation
/// algorithm never reads it.
struct WeakSample {
  SampleId id = 0;
  std::vector<double> features;
  ClassLabel audit_label = 0;

  friend bool operator==(const WeakSample&, const WeakSample&) = default;
};

struct VoteRow {
  SampleId id = 0;
  std::vector<ClassLabel> predictions;  // one per view
  bool unanimous = false;
  std::optional<ClassLabel> voted_label;  // set iff unanimous

  friend bool operator==(const VoteRow&, const VoteRow&) = default;
};

struct VoteTable {
  int views = 0;
  std::vector<VoteRow> rows;  // dataset order

  std::size_t unanimous_count() const;
  std::string to_csv() const;

  friend bool operator==(const VoteTable&, const VoteTable&) = default;
};

/// Strong set D^s (labelled) and weak set D^w (unlabelled), with
/// |strong| + |weak| == total.
struct CurationState {
  LabeledDataset strong;
  std::vector<WeakSample> weak;
  std::size_t total = 0;

  /// Throws ErrorCode::id_mismatch if the size invariant fails or an id
  /// appears twice.
  void check_invariants() const;
};

enum class StrongLabel { voted, original };

/// Per-view seeds: derive_seed(seed, {view-stream, j}); the split uses its own stream.
std::vector<Model> train_views(const LabeledDataset& ds, int n, const ClassifierConfig& config,
                               std::uint64_t seed);

/// Every model predicts every sample; unanimity is exact equality of all n
/// predictions.
VoteTable vote(std::span<const Model> models, const LabeledDataset& ds);

/// Builds a VoteTable from precomputed per-view predictions ([row][view]).
VoteTable make_vote_table(const LabeledDataset& ds,
                          std::vector<std::vector<ClassLabel>> predictions);

/// Unanimous samples go to the strong set, labelled per `strong_label`;
/// the rest lose their label and are appended to `carried_weak`.
CurationState partition(const LabeledDataset& ds, const VoteTable& table,
                        std::vector<WeakSample> carried_weak,
                        StrongLabel strong_label = StrongLabel::voted);

}  // namespace mvver
