#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mvver/dataset.hpp"

namespace mvver {

enum class ModelKind { softmax, mlp };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct ClassifierConfig {
  ModelKind kind = ModelKind::softmax;
  int hidden_units = 64;  // mlp only
  int epochs = 50;
  double learning_rate = 1e-3;
  int batch_size = 32;
  double l2 = 0.0;
  bool standardize = true;  // z-score features with training-set statistics
  std::uint64_t seed = 0;

  // Adam
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// Class probabilities. Entries are strictly positive and sum to one.
class ProbVector {
 public:
  ProbVector() = default;

  /// Validates the invariants; throws mvver::Error on violation.
  static ProbVector from(std::vector<double> probs);

  /// Numerically safe softmax (max-subtracted, underflow clamped to the
  /// smallest normal double so every entry stays positive).
  static ProbVector softmax(std::span<const double> logits);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const { return probs_; }

 private:
  explicit ProbVector(std::vector<double> p) : probs_(std::move(p)) {}
  std::vector<double> probs_;
};

/// Trained classifier. Inputs are mapped to (x - shift) * scale when
/// `shift`/`scale` are non-empty. Parameters are stored flat:
///   softmax: W[C x d], b[C]
///   mlp:     W1[h x d], b1[h], W2[C x h], b2[C]   (ReLU hidden layer)
struct Model {
  ModelKind kind = ModelKind::softmax;
  int dim = 0;
  int num_classes = 0;
  int hidden_units = 0;
  std::vector<double> shift;
  std::vector<double> scale;
  std::vector<double> params;

  struct Layout {
    std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0, total = 0;
  };
  Layout layout() const;

  /// All-zero parameters of the right shape.
  static Model zeros(ModelKind kind, int dim, int num_classes, int hidden_units = 0);

  /// Zero biases, weights uniform in +-1/sqrt(fan_in).
  static Model initialized(ModelKind kind, int dim, int num_classes, int hidden_units,
                           std::uint64_t seed);

  void validate() const;

  friend bool operator==(const Model&, const Model&) = default;
};

/// Probability floor applied inside the log of the cross-entropy.
inline constexpr double kProbabilityFloor = 1e-12;

std::vector<double> logits(const Model& model, std::span<const double> features);
ProbVector predict_proba(const Model& model, std::span<const double> features);
ClassLabel predict(const Model& model, std::span<const double> features);

/// Index of the largest entry; ties go to the lowest index.
ClassLabel argmax(const ProbVector& probs);

/// -log(max(p[label], 1e-12)).
double cross_entropy(const ProbVector& probs, ClassLabel label);

/// Mean cross-entropy of `model` over `batch` plus (l2/2)*||weights||^2 (biases
/// excluded). When `grad` is non-null it receives the gradient w.r.t. params.
double loss_and_gradient(const Model& model, std::span<const Sample* const> batch, double l2,
                         std::vector<double>* grad);

struct TrainResult {
  Model model;
  std::vector<double> epoch_loss;  // mean per-sample loss seen during each epoch
};

/// Mini-batch Adam on cross-entropy for exactly config.epochs epochs.
/// Deterministic in (dataset, config). Throws ErrorCode::divergence on a
/// non-finite loss.
TrainResult train(const LabeledDataset& ds, const ClassifierConfig& config);
Model fit(const LabeledDataset& ds, const ClassifierConfig& config);

std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

}  // namespace mvver
