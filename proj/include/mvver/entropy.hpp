#pragma once

#include <span>
#include <string>
#include <vector>

#include "mvver/classifier.hpp"
#include "mvver/voting.hpp"

namespace mvver {

enum class EntropyUnit { nats, bits };

/// Shannon entropy -sum p log p. Terms with p <= 1e-15 contribute nothing.
double prediction_entropy(const ProbVector& p, EntropyUnit unit = EntropyUnit::nats);
double prediction_entropy(std::span<const double> p, EntropyUnit unit = EntropyUnit::nats);

struct EntropyRecord {
  SampleId sample_id = 0;
  double entropy = 0.0;
  ClassLabel map_label = 0;
  double map_prob = 0.0;

  friend bool operator==(const EntropyRecord&, const EntropyRecord&) = default;
};

struct RecoveryConfig {
  /// Inclusive entropy threshold. A negative value disables recovery.
  double alpha = 1.5;
  EntropyUnit unit = EntropyUnit::nats;
};

/// Scores every weak sample under the strong model and sorts ascending by
/// entropy (ties by sample id).
std::vector<EntropyRecord> rank_weak(const Model& strong_model,
                                     std::span<const WeakSample> weak,
                                     EntropyUnit unit = EntropyUnit::nats);

struct RecoveryResult {
  CurationState state;
  std::vector<SampleId> recovered;  // ids moved weak -> strong, ascending entropy
};

/// Moves every weak sample with entropy <= alpha into the strong set, labelled
/// with its MAP class. Records must cover exactly the weak ids.
RecoveryResult recover(const CurationState& state, std::span<const EntropyRecord> records,
                       const RecoveryConfig& cfg);

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [0, max_entropy]; the last bin is closed on the right
/// and absorbs anything above max_entropy.
Histogram entropy_histogram(std::span<const EntropyRecord> records, int bins,
                            double max_entropy);
Histogram entropy_histogram(std::span<const EntropyRecord> records, int bins, int num_classes,
                            EntropyUnit unit = EntropyUnit::nats);

std::string histogram_to_json(const Histogram& h);
std::string histogram_to_csv(const Histogram& h);
std::string records_to_csv(std::span<const EntropyRecord> records);

}  // namespace mvver
