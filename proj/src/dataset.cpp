#include "mvver/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "mvver/error.hpp"
#include "mvver/rng.hpp"

namespace mvver {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void row_error(const std::string& source, std::size_t line,
                            const std::string& what) {
  throw Error(ErrorCode::parse_error,
              source + ": row " + std::to_string(line) + ": " + what);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void LabeledDataset::validate() const {
  if (num_classes < 1) throw Error(ErrorCode::invalid_argument, "num_classes must be positive");
  std::unordered_set<SampleId> seen;
  for (const auto& s : samples) {
    if (!seen.insert(s.id).second)
      throw Error(ErrorCode::id_mismatch, "duplicate sample id " + std::to_string(s.id));
    if (s.label < 0 || s.label >= num_classes)
      throw Error(ErrorCode::label_out_of_range,
                  "label out of range: " + std::to_string(s.label) + " (sample " +
                      std::to_string(s.id) + ", classes=" + std::to_string(num_classes) + ")");
    if (static_cast<int>(s.features.size()) != dim)
      throw Error(ErrorCode::dimension_mismatch,
                  "sample " + std::to_string(s.id) + " has dimension " +
                      std::to_string(s.features.size()) + ", expected " + std::to_string(dim));
    for (double f : s.features)
      if (!std::isfinite(f))
        throw Error(ErrorCode::invalid_argument,
                    "non-finite feature in sample " + std::to_string(s.id));
  }
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(num_classes, 0)), 0);
  for (const auto& s : samples) ++counts.at(static_cast<std::size_t>(s.label));
  return counts;
}

std::vector<SampleId> LabeledDataset::ids() const {
  std::vector<SampleId> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.id);
  return out;
}

LabeledDataset NoiseLedger::revert(const LabeledDataset& corrupted) const {
  LabeledDataset out = corrupted;
  for (auto& s : out.samples) {
    if (auto it = entries.find(s.id); it != entries.end()) {
      if (s.label != it->second.corrupted)
        throw Error(ErrorCode::id_mismatch,
                    "ledger entry for sample " + std::to_string(s.id) +
                        " does not match its current label");
      s.label = it->second.original;
    }
  }
  return out;
}

// --- CSV -------------------------------------------------------------------

LabeledDataset parse_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  int declared_classes = -1;

  // Optional metadata comment, then the header.
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto eq = t.find("classes=");
      if (eq != std::string::npos) {
        const std::string v = trim(std::string_view(t).substr(eq + 8));
        int c = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), c);
        if (ec != std::errc() || p != v.data() + v.size() || c < 1)
          row_error(source, lineno, "bad classes metadata '" + t + "'");
        declared_classes = c;
      }
      continue;
    }
    header = split_fields(t);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::empty_dataset, source + ": empty dataset");
  if (header.size() < 2 || header.back() != "label")
    row_error(source, lineno, "header must be f0,...,f{d-1},label");
  const int dim = static_cast<int>(header.size()) - 1;
  for (int j = 0; j < dim; ++j)
    if (header[static_cast<std::size_t>(j)] != "f" + std::to_string(j))
      row_error(source, lineno, "expected column 'f" + std::to_string(j) + "', got '" +
                                    header[static_cast<std::size_t>(j)] + "'");

  LabeledDataset ds;
  ds.dim = dim;
  ClassLabel max_label = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_fields(t);
    if (fields.size() != header.size())
      row_error(source, lineno,
                "inconsistent column count: " + std::to_string(fields.size()) + " vs " +
                    std::to_string(header.size()));
    Sample s;
    s.id = static_cast<SampleId>(ds.samples.size());
    s.features.resize(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
      const auto& f = fields[static_cast<std::size_t>(j)];
      double v = 0;
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || p != f.data() + f.size() || !std::isfinite(v))
        row_error(source, lineno, "malformed feature '" + f + "'");
      s.features[static_cast<std::size_t>(j)] = v;
    }
    const auto& lf = fields.back();
    long long label = 0;
    auto [p, ec] = std::from_chars(lf.data(), lf.data() + lf.size(), label);
    if (ec != std::errc() || p != lf.data() + lf.size())
      row_error(source, lineno, "non-integer label '" + lf + "'");
    if (label < 0) row_error(source, lineno, "negative label " + lf);
    if (declared_classes > 0 && label >= declared_classes)
      throw Error(ErrorCode::label_out_of_range,
                  source + ": row " + std::to_string(lineno) + ": label out of range: " + lf +
                      " (classes=" + std::to_string(declared_classes) + ")");
    if (label > std::numeric_limits<ClassLabel>::max() - 1)
      row_error(source, lineno, "label too large");
    s.label = static_cast<ClassLabel>(label);
    max_label = std::max(max_label, s.label);
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) throw Error(ErrorCode::empty_dataset, source + ": empty dataset");
  ds.num_classes = declared_classes > 0 ? declared_classes : max_label + 1;
  return ds;
}

LabeledDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  return parse_csv(in, path.string());
}

void write_csv(const LabeledDataset& ds, std::ostream& out) {
  out << "# classes=" << ds.num_classes << '\n';
  for (int j = 0; j < ds.dim; ++j) out << 'f' << j << ',';
  out << "label\n";
  for (const auto& s : ds.samples) {
    for (double f : s.features) out << format_double(f) << ',';
    out << s.label << '\n';
  }
}

void save_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  write_csv(ds, out);
}

std::string ledger_to_json(const NoiseLedger& ledger) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [id, e] : ledger.entries)
    arr.push_back({{"id", id}, {"original", e.original}, {"corrupted", e.corrupted}});
  return arr.dump(2);
}

NoiseLedger ledger_from_json(const std::string& text) {
  NoiseLedger ledger;
  try {
    const auto arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw Error(ErrorCode::parse_error, "ledger must be a JSON array");
    for (const auto& e : arr) {
      NoiseEntry entry{e.at("original").get<ClassLabel>(), e.at("corrupted").get<ClassLabel>()};
      if (entry.original == entry.corrupted)
        throw Error(ErrorCode::parse_error, "ledger entry with original == corrupted");
      ledger.entries.emplace(e.at("id").get<SampleId>(), entry);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::parse_error, std::string("ledger: ") + ex.what());
  }
  return ledger;
}

// --- generation ------------------------------------------------------------

NoisyDataset make_blobs(const BlobsSpec& spec) {
  if (spec.num_classes < 1 || spec.per_class < 1 || spec.dim < 1)
    throw Error(ErrorCode::invalid_argument, "make_blobs: counts must be positive");
  if (!(spec.separation > 0) || !(spec.spread > 0))
    throw Error(ErrorCode::invalid_argument, "make_blobs: separation and spread must be positive");

  Rng rng(derive_seed(spec.seed, {0xb10b5}));
  const auto C = static_cast<std::size_t>(spec.num_classes);
  const auto d = static_cast<std::size_t>(spec.dim);
  std::vector<std::vector<double>> means(C, std::vector<double>(d, 0.0));

  if (C <= d) {
    // Scaled basis vectors: every pair is exactly `separation` apart.
    const double scale = spec.separation / std::sqrt(2.0);
    for (std::size_t c = 0; c < C; ++c) means[c][c] = scale;
  } else if (d == 1) {
    for (std::size_t c = 0; c < C; ++c) means[c][0] = spec.separation * static_cast<double>(c);
  } else {
    // Regular C-gon in the first two coordinates, adjacent vertices
    // `separation` apart, randomly rotated.
    const double pi = std::acos(-1.0);
    const double radius = spec.separation / (2.0 * std::sin(pi / static_cast<double>(C)));
    const double phase = rng.uniform(0.0, 2.0 * pi);
    for (std::size_t c = 0; c < C; ++c) {
      const double angle = phase + 2.0 * pi * static_cast<double>(c) / static_cast<double>(C);
      means[c][0] = radius * std::cos(angle);
      means[c][1] = radius * std::sin(angle);
    }
  }

  NoisyDataset out;
  out.data.num_classes = spec.num_classes;
  out.data.dim = spec.dim;
  out.data.samples.reserve(C * static_cast<std::size_t>(spec.per_class));
  for (std::size_t c = 0; c < C; ++c) {
    for (int i = 0; i < spec.per_class; ++i) {
      Sample s;
      s.id = static_cast<SampleId>(out.data.samples.size());
      s.label = static_cast<ClassLabel>(c);
      s.features.resize(d);
      for (std::size_t j = 0; j < d; ++j) s.features[j] = means[c][j] + spec.spread * rng.normal();
      out.data.samples.push_back(std::move(s));
    }
  }
  return out;
}

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

NoisyDataset inject_noise(const LabeledDataset& ds, const NoiseSpec& spec) {
  if (!(spec.ratio >= 0.0 && spec.ratio < 1.0))
    throw Error(ErrorCode::invalid_argument, "noise ratio must be in [0, 1)");
  if (ds.num_classes < 2)
    throw Error(ErrorCode::invalid_argument,
                "inject_noise: C = 1, no wrong class exists to flip to");

  NoisyDataset out{ds, {}};
  Rng rng(derive_seed(spec.seed, {0x4015e}));
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(ds.num_classes));
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    by_class.at(static_cast<std::size_t>(ds.samples[i].label)).push_back(i);

  for (auto& members : by_class) {
    const std::size_t flips = round_half_up(spec.ratio * static_cast<double>(members.size()));
    // Partial Fisher-Yates: the first `flips` slots become a uniform subset.
    for (std::size_t k = 0; k < flips; ++k) {
      const auto j = k + static_cast<std::size_t>(rng.below(members.size() - k));
      std::swap(members[k], members[j]);
    }
    for (std::size_t k = 0; k < flips; ++k) {
      Sample& s = out.data.samples[members[k]];
      auto target = static_cast<ClassLabel>(rng.below(static_cast<std::uint64_t>(ds.num_classes - 1)));
      if (target >= s.label) ++target;
      out.ledger.entries.emplace(s.id, NoiseEntry{s.label, target});
      s.label = target;
    }
  }
  return out;
}

std::vector<LabeledDataset> stratified_split(const LabeledDataset& ds, int n,
                                             std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "stratified_split: n must be >= 2");
  const auto counts = ds.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] < static_cast<std::size_t>(n))
      throw Error(ErrorCode::class_too_small,
                  "class " + std::to_string(c) + " has " + std::to_string(counts[c]) +
                      " members, fewer than n=" + std::to_string(n) + " views");

  Rng rng(derive_seed(seed, {0x5b117}));
  std::vector<std::vector<std::size_t>> by_class(counts.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    by_class[static_cast<std::size_t>(ds.samples[i].label)].push_back(i);

  std::vector<std::size_t> assignment(ds.samples.size());
  std::size_t next_part = 0;
  for (auto& members : by_class) {
    shuffle(members, rng);
    // Round-robin dealing that continues where the previous class stopped, so
    // both per-class and total sizes stay within one of each other.
    for (std::size_t idx : members) {
      assignment[idx] = next_part;
      next_part = (next_part + 1) % static_cast<std::size_t>(n);
    }
  }

  std::vector<LabeledDataset> parts(static_cast<std::size_t>(n));
  for (auto& p : parts) {
    p.num_classes = ds.num_classes;
    p.dim = ds.dim;
  }
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    parts[assignment[i]].samples.push_back(ds.samples[i]);
  return parts;
}

std::pair<LabeledDataset, LabeledDataset> stratified_holdout(const LabeledDataset& ds,
                                                             double fraction,
                                                             std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw Error(ErrorCode::invalid_argument, "holdout fraction must be in (0, 1)");
  Rng rng(derive_seed(seed, {0x401d}));
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(ds.num_classes));
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    by_class.at(static_cast<std::size_t>(ds.samples[i].label)).push_back(i);

  std::vector<char> to_second(ds.samples.size(), 0);
  for (auto& members : by_class) {
    shuffle(members, rng);
    const std::size_t k = round_half_up(fraction * static_cast<double>(members.size()));
    for (std::size_t i = 0; i < k; ++i) to_second[members[i]] = 1;
  }
  LabeledDataset first{{}, ds.num_classes, ds.dim};
  LabeledDataset second{{}, ds.num_classes, ds.dim};
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    (to_second[i] ? second : first).samples.push_back(ds.samples[i]);
  return {std::move(first), std::move(second)};
}

LabeledDataset select_ids(const LabeledDataset& ds, std::span<const SampleId> ids) {
  const std::set<SampleId> wanted(ids.begin(), ids.end());
  LabeledDataset out{{}, ds.num_classes, ds.dim};
  for (const auto& s : ds.samples)
    if (wanted.contains(s.id)) out.samples.push_back(s);
  if (out.samples.size() != wanted.size())
    throw Error(ErrorCode::id_mismatch, "select_ids: some ids are not in the dataset");
  return out;
}

}  // namespace mvver
