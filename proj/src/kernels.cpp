#include "mvver/kernels.hpp"

#include <exception>

#include <omp.h>

#include "mvver/entropy.hpp"
#include "mvver/error.hpp"

namespace mvver::kernels {

namespace {

EntropyScore score_row(const Model& model, std::span<const double> row, bool bits) {
  const ProbVector p = predict_proba(model, row);
  const ClassLabel top = argmax(p);
  return {prediction_entropy(p, bits ? EntropyUnit::bits : EntropyUnit::nats), top,
          p[static_cast<std::size_t>(top)]};
}

// OpenMP regions must not leak exceptions; keep the first one by index.
class ErrorSlot {
 public:
  explicit ErrorSlot(std::size_t n) : errors_(n) {}
  template <class F>
  void run(std::size_t i, F&& f) {
    try {
      f();
    } catch (...) {
      errors_[i] = std::current_exception();
    }
  }
  void rethrow() const {
    for (const auto& e : errors_)
      if (e) std::rethrow_exception(e);
  }

 private:
  std::vector<std::exception_ptr> errors_;
};

void check_rows(const Model& model, const FeatureRows& rows) {
  for (const auto& r : rows)
    if (static_cast<int>(r.size()) != model.dim)
      throw Error(ErrorCode::dimension_mismatch, "feature dimension does not match model");
}

}  // namespace

std::vector<ClassLabel> predict_labels(const Model& model, const FeatureRows& rows) {
  check_rows(model, rows);
  std::vector<ClassLabel> out(rows.size());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = predict(model, rows[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<ClassLabel> predict_labels_serial(const Model& model, const FeatureRows& rows) {
  std::vector<ClassLabel> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(predict(model, r));
  return out;
}

std::vector<std::vector<ClassLabel>> predict_views(std::span<const Model> models,
                                                   const FeatureRows& rows) {
  for (const auto& m : models) check_rows(m, rows);
  const std::size_t V = models.size();
  std::vector<std::vector<ClassLabel>> out(rows.size(), std::vector<ClassLabel>(V));
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto row = static_cast<std::size_t>(i);
    for (std::size_t v = 0; v < V; ++v) out[row][v] = predict(models[v], rows[row]);
  }
  return out;
}

std::vector<std::vector<ClassLabel>> predict_views_serial(std::span<const Model> models,
                                                          const FeatureRows& rows) {
  std::vector<std::vector<ClassLabel>> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<ClassLabel> z;
    for (const auto& m : models) z.push_back(predict(m, r));
    out.push_back(std::move(z));
  }
  return out;
}

std::vector<EntropyScore> score_entropy(const Model& model, const FeatureRows& rows, bool bits) {
  check_rows(model, rows);
  std::vector<EntropyScore> out(rows.size());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = score_row(model, rows[static_cast<std::size_t>(i)], bits);
  return out;
}

std::vector<EntropyScore> score_entropy_serial(const Model& model, const FeatureRows& rows,
                                               bool bits) {
  std::vector<EntropyScore> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(score_row(model, r, bits));
  return out;
}

std::vector<Model> fit_all(std::span<const LabeledDataset> parts,
                           std::span<const ClassifierConfig> configs) {
  if (parts.size() != configs.size())
    throw Error(ErrorCode::invalid_argument, "fit_all: one config per dataset required");
  std::vector<Model> out(parts.size());
  ErrorSlot errors(parts.size());
  const auto n = static_cast<std::ptrdiff_t>(parts.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(i);
    errors.run(j, [&] { out[j] = fit(parts[j], configs[j]); });
  }
  errors.rethrow();
  return out;
}

std::vector<Model> fit_all_serial(std::span<const LabeledDataset> parts,
                                  std::span<const ClassifierConfig> configs) {
  if (parts.size() != configs.size())
    throw Error(ErrorCode::invalid_argument, "fit_all: one config per dataset required");
  std::vector<Model> out;
  for (std::size_t j = 0; j < parts.size(); ++j) out.push_back(fit(parts[j], configs[j]));
  return out;
}

}  // namespace mvver::kernels
