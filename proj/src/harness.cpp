#include "mvver/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

#include "mvver/config_io.hpp"
#include "mvver/error.hpp"
#include "mvver/kernels.hpp"
#include "mvver/rng.hpp"

namespace mvver {

namespace {

// Stream tags for a cell's RNG.
constexpr std::uint64_t kHoldoutStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kRefineStream = 3;
constexpr std::uint64_t kFinalStream = 4;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

MethodSummary summarize(const std::vector<double>& values) {
  MethodSummary s;
  if (values.size() >= 2) {
    const auto iv = aggregate(values);
    s.mean = iv.mean;
    s.ci95 = iv.half_width;
  } else if (!values.empty()) {
    s.mean = values.front();
  }
  return s;
}

}  // namespace

double evaluate(const Model& model, const LabeledDataset& test) {
  if (test.empty()) throw Error(ErrorCode::empty_dataset, "evaluate: empty test set");
  const auto predicted = kernels::predict_labels(model, kernels::rows_of(test.samples));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == test.samples[i].label;
  return static_cast<double>(hits) / static_cast<double>(test.size());
}

CurationMetrics curation_metrics(const NoiseLedger& ledger, const LabeledDataset& clean_truth,
                                 const LabeledDataset& curated,
                                 std::span<const SampleId> recovered_ids,
                                 std::span<const SampleId> ever_weak_ids) {
  std::unordered_map<SampleId, ClassLabel> truth;
  for (const auto& s : clean_truth.samples) truth.emplace(s.id, s.label);
  std::unordered_map<SampleId, ClassLabel> curated_label;
  for (const auto& s : curated.samples) curated_label.emplace(s.id, s.label);

  CurationMetrics m;
  std::size_t correct = 0;
  for (const auto& s : curated.samples) {
    auto it = truth.find(s.id);
    if (it == truth.end())
      throw Error(ErrorCode::id_mismatch,
                  "curation_metrics: curated id " + std::to_string(s.id) + " not in truth set");
    correct += it->second == s.label;
    if (auto e = ledger.entries.find(s.id); e != ledger.entries.end())
      m.residual_corrupted += e->second.corrupted == s.label;
  }
  m.purity = curated.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(curated.size());

  std::size_t recovered_correct = 0;
  for (SampleId id : recovered_ids) {
    auto c = curated_label.find(id);
    if (c == curated_label.end())
      throw Error(ErrorCode::id_mismatch,
                  "curation_metrics: recovered id " + std::to_string(id) + " not in curated set");
    recovered_correct += truth.at(id) == c->second;
  }
  m.recovered = recovered_ids.size();
  if (!recovered_ids.empty())
    m.recovery_precision =
        static_cast<double>(recovered_correct) / static_cast<double>(recovered_ids.size());
  if (!ever_weak_ids.empty())
    m.recovery_recall =
        static_cast<double>(recovered_correct) / static_cast<double>(ever_weak_ids.size());
  return m;
}

double student_t_975(int dof) {
  if (dof < 1) throw Error(ErrorCode::invalid_argument, "t quantile needs dof >= 1");
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.975);
}

Interval aggregate(std::span<const double> values) {
  if (values.size() < 2)
    throw Error(ErrorCode::invalid_argument, "aggregate: need at least 2 values");
  const auto k = static_cast<double>(values.size());
  // Deviations are taken from the first value so equal inputs give exactly 0.
  const double origin = values.front();
  double shift = 0;
  for (double v : values) shift += v - origin;
  shift /= k;
  double ss = 0;
  for (double v : values) ss += (v - origin - shift) * (v - origin - shift);
  const double sd = std::sqrt(ss / (k - 1));
  return {origin + shift, student_t_975(static_cast<int>(values.size()) - 1) * sd / std::sqrt(k)};
}

void ExperimentConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(ErrorCode::invalid_argument, "test_fraction must be in (0, 1)");
  if (repeats < 1) throw Error(ErrorCode::invalid_argument, "repeats must be >= 1");
  if (noise_ratios.empty()) throw Error(ErrorCode::invalid_argument, "noise_ratios is empty");
  for (double r : noise_ratios)
    if (!(r >= 0.0 && r < 1.0))
      throw Error(ErrorCode::invalid_argument, "noise ratios must be in [0, 1)");
  refine.validate();
}

LabeledDataset load_source(const DataSource& source) {
  if (const auto* blobs = std::get_if<BlobsSpec>(&source)) return make_blobs(*blobs).data;
  return load_csv(std::get<CsvSource>(source).path);
}

CellResult run_cell(const LabeledDataset& clean, const ExperimentConfig& cfg,
                    std::size_t ratio_index, int repeat) {
  const double ratio = cfg.noise_ratios.at(ratio_index);
  const std::uint64_t cell_seed =
      derive_seed(cfg.seed, {ratio_index, static_cast<std::uint64_t>(repeat)});

  CellResult cell;
  cell.ratio = ratio;
  cell.repeat = repeat;

  auto [train_clean, test] =
      stratified_holdout(clean, cfg.test_fraction, derive_seed(cell_seed, {kHoldoutStream}));
  auto noisy = inject_noise(train_clean, {ratio, derive_seed(cell_seed, {kNoiseStream})});
  cell.train_size = noisy.data.size();
  cell.test_size = test.size();
  cell.flipped = noisy.ledger.size();

  // Test-set hygiene: the evaluation split never contains a training id.
  std::set<SampleId> train_ids;
  for (const auto& s : noisy.data.samples) train_ids.insert(s.id);
  for (const auto& s : test.samples)
    if (train_ids.contains(s.id))
      throw Error(ErrorCode::id_mismatch, "test set shares id " + std::to_string(s.id) +
                                              " with the noisy training set");

  RefineConfig refine = cfg.refine;
  refine.seed = derive_seed(cell_seed, {kRefineStream});
  ClassifierConfig final_cfg = cfg.refine.final_classifier;
  final_cfg.seed = derive_seed(cell_seed, {kFinalStream});

  RefineOptions options;
  options.clean_truth = &train_clean;
  options.test = &test;
  auto refined = run_refinement(noisy.data, refine, options);
  cell.iterations = refined.reports;
  cell.curated_size = refined.curated.size();
  cell.metrics = curation_metrics(noisy.ledger, train_clean, refined.curated,
                                  refined.recovered_ids, refined.ever_weak_ids);
  cell.full_accuracy = evaluate(train_final(refined.curated, final_cfg), test);

  if (cfg.baselines.naive) cell.naive_accuracy = evaluate(fit(noisy.data, final_cfg), test);
  if (cfg.baselines.voting_only) {
    RefineConfig voting = refine;
    voting.alpha = -1.0;
    auto voted = run_refinement(noisy.data, voting);
    cell.voting_only_accuracy = evaluate(train_final(voted.curated, final_cfg), test);
  }
  return cell;
}

RunReport run_experiment(const ExperimentConfig& cfg, const LabeledDataset& clean) {
  cfg.validate();
  clean.validate();
  const std::size_t R = cfg.noise_ratios.size();
  const auto reps = static_cast<std::size_t>(cfg.repeats);
  const std::size_t total = R * reps;

  RunReport report;
  report.cells.resize(total);
  std::vector<std::exception_ptr> errors(total);
  const auto n = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const std::size_t r = k / reps;
    const int rep = static_cast<int>(k % reps);
    try {
      report.cells[k] = run_cell(clean, cfg, r, rep);
    } catch (const Error& e) {
      errors[k] = std::make_exception_ptr(
          Error(e.code(), "ratio " + format_double(cfg.noise_ratios[r]) + ", repeat " +
                              std::to_string(rep) + ": " + e.what()));
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t r = 0; r < R; ++r) {
    std::vector<double> full, naive, voting, purity;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const auto& c = report.cells[r * reps + rep];
      full.push_back(c.full_accuracy);
      if (c.naive_accuracy) naive.push_back(*c.naive_accuracy);
      if (c.voting_only_accuracy) voting.push_back(*c.voting_only_accuracy);
      purity.push_back(c.metrics.purity);
    }
    RatioSummary s;
    s.ratio = cfg.noise_ratios[r];
    s.full = summarize(full);
    if (!naive.empty()) s.naive = summarize(naive);
    if (!voting.empty()) s.voting_only = summarize(voting);
    s.purity = summarize(purity);
    report.summary.push_back(s);
  }
  return report;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, load_source(cfg.data));
}

namespace {

nlohmann::json to_json(const MethodSummary& s) {
  nlohmann::json j{{"mean", s.mean}};
  j["ci95"] = s.ci95 ? nlohmann::json(*s.ci95) : nlohmann::json(nullptr);
  return j;
}

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string report_to_json(const RunReport& report, const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["format"] = "mvver-run-report";
  j["version"] = kConfigVersion;
  j["metadata"] = {
      {"accuracy_unit", "fraction"},
      {"ci_method", "student-t, 95%, two-sided, repeats-1 degrees of freedom"},
      {"entropy_unit", cfg.refine.unit == EntropyUnit::bits ? "bits" : "nats"},
      {"split", "stratified holdout; noise injected on the training part only"},
  };
  j["config"] = to_json(cfg);

  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json iters = nlohmann::json::array();
    for (const auto& r : c.iterations) iters.push_back(to_json(r));
    cells.push_back({
        {"ratio", c.ratio},
        {"repeat", c.repeat},
        {"train_size", c.train_size},
        {"test_size", c.test_size},
        {"flipped", c.flipped},
        {"curated_size", c.curated_size},
        {"accuracy",
         {{"full", c.full_accuracy},
          {"naive", optional_json(c.naive_accuracy)},
          {"voting_only", optional_json(c.voting_only_accuracy)}}},
        {"curation",
         {{"purity", c.metrics.purity},
          {"recovery_precision", c.metrics.recovery_precision},
          {"recovery_recall", c.metrics.recovery_recall},
          {"recovered", c.metrics.recovered},
          {"residual_corrupted", c.metrics.residual_corrupted}}},
        {"iterations", iters},
    });
  }
  j["cells"] = cells;

  nlohmann::json summary = nlohmann::json::array();
  for (const auto& s : report.summary) {
    nlohmann::json row{{"ratio", s.ratio}, {"full", to_json(s.full)}, {"purity", to_json(s.purity)}};
    row["naive"] = s.naive ? to_json(*s.naive) : nlohmann::json(nullptr);
    row["voting_only"] = s.voting_only ? to_json(*s.voting_only) : nlohmann::json(nullptr);
    summary.push_back(row);
  }
  j["summary"] = summary;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const RunReport& report) {
  std::ostringstream out;
  out << "ratio,naive,naive_ci95,voting_only,voting_only_ci95,full,full_ci95\n";
  auto cell = [&](const std::optional<MethodSummary>& m) {
    if (!m) return std::string(",");
    return format_double(m->mean) + "," + (m->ci95 ? format_double(*m->ci95) : "");
  };
  for (const auto& s : report.summary)
    out << format_double(s.ratio) << ',' << cell(s.naive) << ',' << cell(s.voting_only) << ','
        << cell(s.full) << '\n';
  return out.str();
}

std::vector<AlphaCandidate> sweep_alpha(const LabeledDataset& noisy_train,
                                        const RefineConfig& cfg,
                                        std::span<const double> alphas,
                                        double holdout_fraction) {
  RefineConfig voting = cfg;
  voting.alpha = -1.0;
  const auto voted = run_refinement(noisy_train, voting);
  auto [unused, holdout] =
      stratified_holdout(voted.curated, holdout_fraction, derive_seed(cfg.seed, {0xa1fa}));
  if (holdout.empty()) throw Error(ErrorCode::empty_dataset, "sweep_alpha: holdout is empty");

  std::set<SampleId> held;
  for (const auto& s : holdout.samples) held.insert(s.id);
  LabeledDataset pool{{}, noisy_train.num_classes, noisy_train.dim};
  for (const auto& s : noisy_train.samples)
    if (!held.contains(s.id)) pool.samples.push_back(s);

  std::vector<AlphaCandidate> out;
  for (double alpha : alphas) {
    RefineConfig c = cfg;
    c.alpha = alpha;
    const auto refined = run_refinement(pool, c);
    const Model model = train_final(refined.curated, c.final_classifier);
    out.push_back({alpha, evaluate(model, holdout), refined.curated.size()});
  }
  return out;
}

}  // namespace mvver
