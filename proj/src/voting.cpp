#include "mvver/voting.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_set>

#include "mvver/error.hpp"
#include "mvver/kernels.hpp"
#include "mvver/rng.hpp"

namespace mvver {

namespace {
constexpr std::uint64_t kSplitStream = 0x5011;
constexpr std::uint64_t kViewStream = 0x7173;
}  // namespace

std::size_t VoteTable::unanimous_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const VoteRow& r) { return r.unanimous; }));
}

std::string VoteTable::to_csv() const {
  std::ostringstream out;
  out << "id";
  for (int j = 1; j <= views; ++j) out << ",z" << j;
  out << ",unanimous,voted_label\n";
  for (const auto& r : rows) {
    out << r.id;
    for (ClassLabel z : r.predictions) out << ',' << z;
    out << ',' << (r.unanimous ? 1 : 0) << ',';
    if (r.voted_label) out << *r.voted_label;
    out << '\n';
  }
  return out.str();
}

void CurationState::check_invariants() const {
  if (strong.size() + weak.size() != total)
    throw Error(ErrorCode::id_mismatch,
                "curation state: |strong| + |weak| = " +
                    std::to_string(strong.size() + weak.size()) + ", expected " +
                    std::to_string(total));
  std::unordered_set<SampleId> seen;
  for (const auto& s : strong.samples)
    if (!seen.insert(s.id).second)
      throw Error(ErrorCode::id_mismatch, "duplicate id " + std::to_string(s.id) + " in strong set");
  for (const auto& w : weak)
    if (!seen.insert(w.id).second)
      throw Error(ErrorCode::id_mismatch,
                  "id " + std::to_string(w.id) + " appears twice across strong/weak sets");
}

std::vector<Model> train_views(const LabeledDataset& ds, int n, const ClassifierConfig& config,
                               std::uint64_t seed) {
  if (n < 2)
    throw Error(ErrorCode::invalid_argument,
                "train_views: n must be >= 2 (unanimity is vacuous with one view)");
  const auto parts = stratified_split(ds, n, derive_seed(seed, {kSplitStream}));
  std::vector<ClassifierConfig> configs(parts.size(), config);
  for (std::size_t j = 0; j < configs.size(); ++j)
    configs[j].seed = derive_seed(seed, {kViewStream, j});
  return kernels::fit_all(parts, configs);
}

VoteTable make_vote_table(const LabeledDataset& ds,
                          std::vector<std::vector<ClassLabel>> predictions) {
  if (predictions.size() != ds.size())
    throw Error(ErrorCode::id_mismatch, "vote table: prediction rows do not match dataset");
  VoteTable table;
  table.views = predictions.empty() ? 0 : static_cast<int>(predictions.front().size());
  table.rows.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    VoteRow row;
    row.id = ds.samples[i].id;
    row.predictions = std::move(predictions[i]);
    if (static_cast<int>(row.predictions.size()) != table.views)
      throw Error(ErrorCode::id_mismatch, "vote table: ragged prediction rows");
    row.unanimous = !row.predictions.empty() &&
                    std::all_of(row.predictions.begin(), row.predictions.end(),
                                [&](ClassLabel z) { return z == row.predictions.front(); });
    if (row.unanimous) row.voted_label = row.predictions.front();
    table.rows.push_back(std::move(row));
  }
  return table;
}

VoteTable vote(std::span<const Model> models, const LabeledDataset& ds) {
  if (models.size() < 2) throw Error(ErrorCode::invalid_argument, "vote: need at least 2 models");
  for (const auto& m : models)
    if (m.num_classes != models.front().num_classes || m.dim != models.front().dim ||
        m.dim != ds.dim || m.num_classes != ds.num_classes)
      throw Error(ErrorCode::dimension_mismatch, "vote: model shape mismatch");
  auto predictions = kernels::predict_views(models, kernels::rows_of(ds.samples));
  auto table = make_vote_table(ds, std::move(predictions));
  table.views = static_cast<int>(models.size());
  return table;
}

CurationState partition(const LabeledDataset& ds, const VoteTable& table,
                        std::vector<WeakSample> carried_weak, StrongLabel strong_label) {
  if (table.rows.size() != ds.size())
    throw Error(ErrorCode::id_mismatch, "partition: vote table does not cover the dataset");
  std::map<SampleId, const VoteRow*> by_id;
  for (const auto& r : table.rows) by_id.emplace(r.id, &r);
  std::unordered_set<SampleId> carried_ids;
  for (const auto& w : carried_weak) carried_ids.insert(w.id);

  CurationState state;
  state.total = ds.size() + carried_weak.size();
  state.strong.num_classes = ds.num_classes;
  state.strong.dim = ds.dim;
  state.weak = std::move(carried_weak);

  for (const auto& s : ds.samples) {
    auto it = by_id.find(s.id);
    if (it == by_id.end())
      throw Error(ErrorCode::id_mismatch,
                  "partition: sample " + std::to_string(s.id) + " missing from vote table");
    if (carried_ids.contains(s.id))
      throw Error(ErrorCode::id_mismatch,
                  "partition: sample " + std::to_string(s.id) + " is already in the weak set");
    const VoteRow& row = *it->second;
    if (row.unanimous) {
      Sample kept = s;
      if (strong_label == StrongLabel::voted) kept.label = *row.voted_label;
      state.strong.samples.push_back(std::move(kept));
    } else {
      state.weak.push_back(WeakSample{s.id, s.features, s.label});
    }
  }
  if (by_id.size() != ds.size())
    throw Error(ErrorCode::id_mismatch, "partition: vote table ids do not match the dataset");
  return state;
}

}  // namespace mvver
