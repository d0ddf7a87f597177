#pragma once

// Data-parallel inference kernels. Each OpenMP kernel has a `_serial`
// reference with identical per-row arithmetic, so outputs match bit for bit.

#include <span>
#include <vector>

#include "mvver/classifier.hpp"

namespace mvver::kernels {

using FeatureRows = std::vector<std::span<const double>>;

template <class Range>
FeatureRows rows_of(const Range& samples) {
  FeatureRows rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) rows.emplace_back(s.features);
  return rows;
}

std::vector<ClassLabel> predict_labels(const Model& model, const FeatureRows& rows);
std::vector<ClassLabel> predict_labels_serial(const Model& model, const FeatureRows& rows);

/// Predictions of every model on every row, laid out [row][model].
std::vector<std::vector<ClassLabel>> predict_views(std::span<const Model> models,
                                                   const FeatureRows& rows);
std::vector<std::vector<ClassLabel>> predict_views_serial(std::span<const Model> models,
                                                          const FeatureRows& rows);

struct EntropyScore {
  double entropy = 0.0;
  ClassLabel map_label = 0;
  double map_prob = 0.0;

  friend bool operator==(const EntropyScore&, const EntropyScore&) = default;
};

std::vector<EntropyScore> score_entropy(const Model& model, const FeatureRows& rows,
                                        bool bits = false);
std::vector<EntropyScore> score_entropy_serial(const Model& model, const FeatureRows& rows,
                                               bool bits = false);

/// Trains one model per dataset, views in parallel.
std::vector<Model> fit_all(std::span<const LabeledDataset> parts,
                           std::span<const ClassifierConfig> configs);
std::vector<Model> fit_all_serial(std::span<const LabeledDataset> parts,
                                  std::span<const ClassifierConfig> configs);

}  // namespace mvver::kernels
