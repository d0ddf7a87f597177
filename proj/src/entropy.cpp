#include "mvver/entropy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "mvver/error.hpp"
#include "mvver/kernels.hpp"

namespace mvver {

namespace {

constexpr double kNegligibleProbability = 1e-15;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

double prediction_entropy(std::span<const double> p, EntropyUnit unit) {
  double h = 0.0;
  for (double v : p)
    if (v > kNegligibleProbability) h -= v * std::log(v);
  if (unit == EntropyUnit::bits) h /= std::numbers::ln2;
  return h;
}

double prediction_entropy(const ProbVector& p, EntropyUnit unit) {
  return prediction_entropy(p.values(), unit);
}

std::vector<EntropyRecord> rank_weak(const Model& strong_model, std::span<const WeakSample> weak,
                                     EntropyUnit unit) {
  const auto scores = kernels::score_entropy(strong_model, kernels::rows_of(weak),
                                             unit == EntropyUnit::bits);
  std::vector<EntropyRecord> records;
  records.reserve(weak.size());
  for (std::size_t i = 0; i < weak.size(); ++i)
    records.push_back({weak[i].id, scores[i].entropy, scores[i].map_label, scores[i].map_prob});
  std::sort(records.begin(), records.end(), [](const EntropyRecord& a, const EntropyRecord& b) {
    if (a.entropy != b.entropy) return a.entropy < b.entropy;
    return a.sample_id < b.sample_id;
  });
  return records;
}

RecoveryResult recover(const CurationState& state, std::span<const EntropyRecord> records,
                       const RecoveryConfig& cfg) {
  if (std::isnan(cfg.alpha)) throw Error(ErrorCode::invalid_argument, "alpha is NaN");
  if (records.size() != state.weak.size())
    throw Error(ErrorCode::id_mismatch, "recover: records do not cover the weak set");
  std::map<SampleId, const EntropyRecord*> by_id;
  for (const auto& r : records) by_id.emplace(r.sample_id, &r);
  if (by_id.size() != records.size())
    throw Error(ErrorCode::id_mismatch, "recover: duplicate ids in entropy records");

  RecoveryResult out;
  out.state.strong = state.strong;
  out.state.total = state.total;
  for (const auto& w : state.weak) {
    auto it = by_id.find(w.id);
    if (it == by_id.end())
      throw Error(ErrorCode::id_mismatch,
                  "recover: no entropy record for weak sample " + std::to_string(w.id));
    const EntropyRecord& r = *it->second;
    if (r.entropy <= cfg.alpha)
      out.state.strong.samples.push_back(Sample{w.id, w.features, r.map_label});
    else
      out.state.weak.push_back(w);
  }
  for (const auto& r : records)
    if (r.entropy <= cfg.alpha) out.recovered.push_back(r.sample_id);
  return out;
}

Histogram entropy_histogram(std::span<const EntropyRecord> records, int bins,
                            double max_entropy) {
  if (bins < 1) throw Error(ErrorCode::invalid_argument, "histogram needs at least one bin");
  if (!(max_entropy > 0))
    throw Error(ErrorCode::invalid_argument, "histogram range must be positive");
  Histogram h;
  const auto B = static_cast<std::size_t>(bins);
  h.counts.assign(B, 0);
  h.edges.resize(B + 1);
  for (std::size_t i = 0; i <= B; ++i)
    h.edges[i] = max_entropy * static_cast<double>(i) / static_cast<double>(B);
  h.edges.back() = max_entropy;
  for (const auto& r : records) {
    const double e = std::max(r.entropy, 0.0);
    auto bin = static_cast<std::size_t>(e / max_entropy * static_cast<double>(B));
    bin = std::min(bin, B - 1);
    // Guard against rounding putting a value on the wrong side of an edge.
    while (bin > 0 && e < h.edges[bin]) --bin;
    while (bin + 1 < B && e >= h.edges[bin + 1]) ++bin;
    ++h.counts[bin];
  }
  return h;
}

Histogram entropy_histogram(std::span<const EntropyRecord> records, int bins, int num_classes,
                            EntropyUnit unit) {
  if (num_classes < 2) throw Error(ErrorCode::invalid_argument, "histogram needs C >= 2");
  double max_entropy = std::log(static_cast<double>(num_classes));
  if (unit == EntropyUnit::bits) max_entropy /= std::numbers::ln2;
  return entropy_histogram(records, bins, max_entropy);
}

std::string histogram_to_json(const Histogram& h) {
  nlohmann::json j;
  j["edges"] = h.edges;
  j["counts"] = h.counts;
  return j.dump(2);
}

std::string histogram_to_csv(const Histogram& h) {
  std::ostringstream out;
  out << "bin,lower,upper,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << i << ',' << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1]) << ','
        << h.counts[i] << '\n';
  return out.str();
}

std::string records_to_csv(std::span<const EntropyRecord> records) {
  std::ostringstream out;
  out << "id,entropy,map_label,map_prob\n";
  for (const auto& r : records)
    out << r.sample_id << ',' << format_double(r.entropy) << ',' << r.map_label << ','
        << format_double(r.map_prob) << '\n';
  return out.str();
}

}  // namespace mvver
