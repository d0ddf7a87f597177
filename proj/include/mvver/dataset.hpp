#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mvver {

using ClassLabel = std::int32_t;
using SampleId = std::int64_t;

struct Sample {
  SampleId id = 0;
  std::vector<double> features;
  ClassLabel label = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Ordered samples sharing one label space [0, num_classes) and one feature
/// dimension. Treated as an immutable value once built.
struct LabeledDataset {
  std::vector<Sample> samples;
  int num_classes = 0;
  int dim = 0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  /// Checks the dataset invariants (unique ids, labels in range, consistent
  /// finite features). Throws mvver::Error.
  void validate() const;

  std::vector<std::size_t> class_counts() const;
  std::vector<SampleId> ids() const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

struct NoiseSpec {
  double ratio = 0.0;
  std::uint64_t seed = 0;
};

struct NoiseEntry {
  ClassLabel original = 0;
  ClassLabel corrupted = 0;

  friend bool operator==(const NoiseEntry&, const NoiseEntry&) = default;
};

/// Ground truth of every injected flip, keyed by sample id. Evaluation only.
struct NoiseLedger {
  std::map<SampleId, NoiseEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  /// Undo every recorded flip.
  LabeledDataset revert(const LabeledDataset& corrupted) const;
};

struct BlobsSpec {
  int num_classes = 3;
  int per_class = 100;
  int dim = 2;
  double separation = 10.0;
  double spread = 1.0;
  std::uint64_t seed = 0;
};

struct NoisyDataset {
  LabeledDataset data;
  NoiseLedger ledger;
};

// --- I/O -------------------------------------------------------------------

/// Reads `f0,...,f{d-1},label` rows, optionally preceded by `# classes=C`.
/// Ids are the 0-based row index.
LabeledDataset load_csv(const std::filesystem::path& path);
LabeledDataset parse_csv(std::istream& in, const std::string& source = "<stream>");

/// Shortest round-trip formatting, so save/load is bit exact.
void save_csv(const LabeledDataset& ds, const std::filesystem::path& path);
void write_csv(const LabeledDataset& ds, std::ostream& out);

std::string ledger_to_json(const NoiseLedger& ledger);
NoiseLedger ledger_from_json(const std::string& text);

// --- generation and corruption ---------------------------------------------

/// Isotropic Gaussian clusters; means are pairwise at least `separation` apart.
NoisyDataset make_blobs(const BlobsSpec& spec);

/// Class-balanced symmetric noise: exactly round(ratio * N_c) flips in each
/// class c, each to a uniformly drawn different class. `ds` is not modified.
NoisyDataset inject_noise(const LabeledDataset& ds, const NoiseSpec& spec);

/// round(x) with halves rounded up; used for per-class flip counts.
std::size_t round_half_up(double x);

/// Splits into n pairwise-disjoint subsets whose per-class counts differ by at
/// most one. Subsets keep the input's sample order.
std::vector<LabeledDataset> stratified_split(const LabeledDataset& ds, int n,
                                             std::uint64_t seed);

/// Stratified two-way split; `fraction` of every class goes to the second set.
std::pair<LabeledDataset, LabeledDataset> stratified_holdout(
    const LabeledDataset& ds, double fraction, std::uint64_t seed);

/// Samples of `ds` whose id is in `ids` (order of `ds`).
LabeledDataset select_ids(const LabeledDataset& ds, std::span<const SampleId> ids);

}  // namespace mvver
