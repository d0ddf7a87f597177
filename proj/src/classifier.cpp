#include "mvver/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "mvver/error.hpp"
#include "mvver/rng.hpp"

namespace mvver {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::mlp ? "mlp" : "softmax";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "softmax") return ModelKind::softmax;
  if (name == "mlp") return ModelKind::mlp;
  throw Error(ErrorCode::invalid_argument, "unknown classifier kind '" + std::string(name) + "'");
}

void ClassifierConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::invalid_argument, "epochs must be >= 1");
  if (!(learning_rate > 0)) throw Error(ErrorCode::invalid_argument, "learning_rate must be > 0");
  if (batch_size < 1) throw Error(ErrorCode::invalid_argument, "batch_size must be >= 1");
  if (!(l2 >= 0)) throw Error(ErrorCode::invalid_argument, "l2 must be >= 0");
  if (kind == ModelKind::mlp && hidden_units < 1)
    throw Error(ErrorCode::invalid_argument, "hidden_units must be >= 1 for mlp");
}

// --- ProbVector ------------------------------------------------------------

ProbVector ProbVector::from(std::vector<double> probs) {
  if (probs.empty()) throw Error(ErrorCode::invalid_argument, "empty probability vector");
  double sum = 0;
  for (double p : probs) {
    if (!(p > 0.0 && p <= 1.0))
      throw Error(ErrorCode::invalid_argument, "probability entries must lie in (0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorCode::invalid_argument, "probabilities must sum to 1");
  return ProbVector(std::move(probs));
}

ProbVector ProbVector::softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    sum += p[i];
  }
  constexpr double tiny = std::numeric_limits<double>::min();
  for (double& v : p) v = std::max(v / sum, tiny);
  return ProbVector(std::move(p));
}

// --- Model -----------------------------------------------------------------

Model::Layout Model::layout() const {
  const auto d = static_cast<std::size_t>(dim);
  const auto C = static_cast<std::size_t>(num_classes);
  Layout l;
  if (kind == ModelKind::softmax) {
    l.w1 = 0;
    l.b1 = C * d;
    l.total = C * d + C;
    l.w2 = l.b2 = l.total;
  } else {
    const auto h = static_cast<std::size_t>(hidden_units);
    l.w1 = 0;
    l.b1 = h * d;
    l.w2 = l.b1 + h;
    l.b2 = l.w2 + C * h;
    l.total = l.b2 + C;
  }
  return l;
}

Model Model::zeros(ModelKind kind, int dim, int num_classes, int hidden_units) {
  Model m;
  m.kind = kind;
  m.dim = dim;
  m.num_classes = num_classes;
  m.hidden_units = kind == ModelKind::mlp ? hidden_units : 0;
  m.params.assign(m.layout().total, 0.0);
  return m;
}

Model Model::initialized(ModelKind kind, int dim, int num_classes, int hidden_units,
                         std::uint64_t seed) {
  Model m = zeros(kind, dim, num_classes, hidden_units);
  Rng rng(derive_seed(seed, {0x1417}));
  const auto l = m.layout();
  auto fill = [&](std::size_t from, std::size_t to, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = from; i < to; ++i) m.params[i] = rng.uniform(-bound, bound);
  };
  fill(l.w1, l.b1, dim);
  if (kind == ModelKind::mlp) fill(l.w2, l.b2, hidden_units);
  return m;
}

void Model::validate() const {
  if (dim < 1 || num_classes < 2)
    throw Error(ErrorCode::invalid_argument, "model needs dim >= 1 and >= 2 classes");
  if (kind == ModelKind::mlp && hidden_units < 1)
    throw Error(ErrorCode::invalid_argument, "mlp model needs hidden_units >= 1");
  if (params.size() != layout().total)
    throw Error(ErrorCode::dimension_mismatch, "parameter count does not match model shape");
  if (shift.size() != scale.size() || (!shift.empty() && static_cast<int>(shift.size()) != dim))
    throw Error(ErrorCode::dimension_mismatch, "standardization vectors do not match model dim");
  for (const auto* v : {&params, &shift, &scale})
    for (double p : *v)
      if (!std::isfinite(p)) throw Error(ErrorCode::invalid_argument, "non-finite model parameter");
}

// --- inference -------------------------------------------------------------

namespace {

void check_dim(const Model& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.dim)
    throw Error(ErrorCode::dimension_mismatch,
                "feature dimension " + std::to_string(x.size()) + " does not match model dim " +
                    std::to_string(model.dim));
}

// out[r] = b[r] + sum_j W[r, j] * x[j]
void affine(const double* W, const double* b, std::span<const double> x, std::size_t rows,
            double* out) {
  const std::size_t cols = x.size();
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = b[r];
    const double* w = W + r * cols;
    for (std::size_t j = 0; j < cols; ++j) acc += w[j] * x[j];
    out[r] = acc;
  }
}

// Forward pass. `input` receives the (standardized) input actually fed to the
// first layer, `hidden` the post-ReLU activations for mlp models.
void forward(const Model& m, std::span<const double> raw, std::vector<double>& input,
             std::vector<double>& hidden, std::vector<double>& z) {
  input.assign(raw.begin(), raw.end());
  if (!m.shift.empty())
    for (std::size_t j = 0; j < input.size(); ++j) input[j] = (input[j] - m.shift[j]) * m.scale[j];
  std::span<const double> x = input;
  const auto l = m.layout();
  const double* p = m.params.data();
  const auto C = static_cast<std::size_t>(m.num_classes);
  z.resize(C);
  if (m.kind == ModelKind::softmax) {
    affine(p + l.w1, p + l.b1, x, C, z.data());
    return;
  }
  const auto h = static_cast<std::size_t>(m.hidden_units);
  hidden.resize(h);
  affine(p + l.w1, p + l.b1, x, h, hidden.data());
  for (double& v : hidden) v = std::max(v, 0.0);
  affine(p + l.w2, p + l.b2, hidden, C, z.data());
}

}  // namespace

std::vector<double> logits(const Model& model, std::span<const double> features) {
  check_dim(model, features);
  std::vector<double> input, hidden, z;
  forward(model, features, input, hidden, z);
  return z;
}

ProbVector predict_proba(const Model& model, std::span<const double> features) {
  const auto z = logits(model, features);
  return ProbVector::softmax(z);
}

ClassLabel argmax(const ProbVector& probs) {
  const auto v = probs.values();
  return static_cast<ClassLabel>(std::max_element(v.begin(), v.end()) - v.begin());
}

ClassLabel predict(const Model& model, std::span<const double> features) {
  return argmax(predict_proba(model, features));
}

double cross_entropy(const ProbVector& probs, ClassLabel label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size())
    throw Error(ErrorCode::label_out_of_range, "cross_entropy: label out of range");
  return -std::log(std::max(probs[static_cast<std::size_t>(label)], kProbabilityFloor));
}

// --- training --------------------------------------------------------------

double loss_and_gradient(const Model& model, std::span<const Sample* const> batch, double l2,
                         std::vector<double>* grad) {
  const auto l = model.layout();
  const auto C = static_cast<std::size_t>(model.num_classes);
  const auto d = static_cast<std::size_t>(model.dim);
  const auto h = static_cast<std::size_t>(model.hidden_units);
  const double* p = model.params.data();
  const bool mlp = model.kind == ModelKind::mlp;
  const double max_loss = -std::log(kProbabilityFloor);

  if (grad) grad->assign(model.params.size(), 0.0);
  std::vector<double> input, hidden, z, dz(C), dh(h);
  double total = 0;

  for (const Sample* s : batch) {
    check_dim(model, s->features);
    forward(model, s->features, input, hidden, z);
    const auto y = static_cast<std::size_t>(s->label);
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0;
    for (double v : z) sum += std::exp(v - top);
    const double nll = std::log(sum) + top - z[y];
    const bool floored = nll >= max_loss;
    total += floored ? max_loss : nll;
    if (!grad || floored) continue;

    for (std::size_t c = 0; c < C; ++c) dz[c] = std::exp(z[c] - top) / sum;
    dz[y] -= 1.0;

    double* g = grad->data();
    std::span<const double> x = input;
    if (!mlp) {
      for (std::size_t c = 0; c < C; ++c) {
        double* gw = g + l.w1 + c * d;
        for (std::size_t j = 0; j < d; ++j) gw[j] += dz[c] * x[j];
        g[l.b1 + c] += dz[c];
      }
      continue;
    }
    std::fill(dh.begin(), dh.end(), 0.0);
    for (std::size_t c = 0; c < C; ++c) {
      const double* w2 = p + l.w2 + c * h;
      double* gw2 = g + l.w2 + c * h;
      for (std::size_t k = 0; k < h; ++k) {
        gw2[k] += dz[c] * hidden[k];
        dh[k] += dz[c] * w2[k];
      }
      g[l.b2 + c] += dz[c];
    }
    for (std::size_t k = 0; k < h; ++k) {
      if (hidden[k] <= 0.0) continue;
      double* gw1 = g + l.w1 + k * d;
      for (std::size_t j = 0; j < d; ++j) gw1[j] += dh[k] * x[j];
      g[l.b1 + k] += dh[k];
    }
  }

  const double scale = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
  double loss = total * scale;
  if (grad)
    for (double& v : *grad) v *= scale;

  if (l2 > 0) {
    auto add_penalty = [&](std::size_t from, std::size_t to) {
      for (std::size_t i = from; i < to; ++i) {
        loss += 0.5 * l2 * p[i] * p[i];
        if (grad) (*grad)[i] += l2 * p[i];
      }
    };
    add_penalty(l.w1, l.b1);
    if (mlp) add_penalty(l.w2, l.b2);
  }
  return loss;
}

TrainResult train(const LabeledDataset& ds, const ClassifierConfig& config) {
  config.validate();
  if (ds.empty()) throw Error(ErrorCode::empty_dataset, "fit: empty dataset");
  if (ds.num_classes < 2)
    throw Error(ErrorCode::invalid_argument, "fit: need at least 2 classes, got " +
                                                 std::to_string(ds.num_classes));
  for (const auto& s : ds.samples)
    if (s.label < 0 || s.label >= ds.num_classes)
      throw Error(ErrorCode::label_out_of_range, "fit: label out of range in sample " +
                                                     std::to_string(s.id));

  TrainResult result;
  result.model = Model::initialized(config.kind, ds.dim, ds.num_classes, config.hidden_units,
                                    config.seed);
  Model& model = result.model;
  if (config.standardize) {
    const auto d = static_cast<std::size_t>(ds.dim);
    const auto n = static_cast<double>(ds.size());
    model.shift.assign(d, 0.0);
    model.scale.assign(d, 1.0);
    for (const auto& s : ds.samples)
      for (std::size_t j = 0; j < d; ++j) model.shift[j] += s.features[j];
    for (auto& v : model.shift) v /= n;
    std::vector<double> var(d, 0.0);
    for (const auto& s : ds.samples)
      for (std::size_t j = 0; j < d; ++j)
        var[j] += (s.features[j] - model.shift[j]) * (s.features[j] - model.shift[j]);
    // Constant features keep unit scale.
    for (std::size_t j = 0; j < d; ++j) {
      const double sd = std::sqrt(var[j] / n);
      model.scale[j] = sd > 1e-12 ? 1.0 / sd : 1.0;
    }
  }
  const std::size_t P = model.params.size();
  std::vector<double> m1(P, 0.0), m2(P, 0.0), grad;
  double beta1_t = 1.0, beta2_t = 1.0;

  std::vector<const Sample*> order;
  order.reserve(ds.size());
  for (const auto& s : ds.samples) order.push_back(&s);

  Rng rng(derive_seed(config.seed, {0x5417f}));
  const auto B = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    double epoch_total = 0;
    for (std::size_t start = 0; start < order.size(); start += B) {
      const std::size_t stop = std::min(start + B, order.size());
      std::span<const Sample* const> batch(order.data() + start, stop - start);
      const double loss = loss_and_gradient(model, batch, config.l2, &grad);
      if (!std::isfinite(loss))
        throw Error(ErrorCode::divergence,
                    "fit: non-finite loss at epoch " + std::to_string(epoch + 1));
      epoch_total += loss * static_cast<double>(batch.size());

      beta1_t *= config.beta1;
      beta2_t *= config.beta2;
      const double c1 = 1.0 / (1.0 - beta1_t);
      const double c2 = 1.0 / (1.0 - beta2_t);
      for (std::size_t i = 0; i < P; ++i) {
        m1[i] = config.beta1 * m1[i] + (1.0 - config.beta1) * grad[i];
        m2[i] = config.beta2 * m2[i] + (1.0 - config.beta2) * grad[i] * grad[i];
        model.params[i] -=
            config.learning_rate * (m1[i] * c1) / (std::sqrt(m2[i] * c2) + config.epsilon);
      }
    }
    result.epoch_loss.push_back(epoch_total / static_cast<double>(order.size()));
  }
  for (double p : model.params)
    if (!std::isfinite(p))
      throw Error(ErrorCode::divergence, "fit: non-finite parameters after training");
  return result;
}

Model fit(const LabeledDataset& ds, const ClassifierConfig& config) {
  return train(ds, config).model;
}

// --- serialization ---------------------------------------------------------

std::string model_to_json(const Model& model) {
  nlohmann::json j;
  j["format"] = "mvver-model";
  j["version"] = 1;
  j["kind"] = to_string(model.kind);
  j["dim"] = model.dim;
  j["num_classes"] = model.num_classes;
  j["hidden_units"] = model.hidden_units;
  j["shift"] = model.shift;
  j["scale"] = model.scale;
  j["params"] = model.params;
  return j.dump();
}

Model model_from_json(const std::string& text) {
  Model m;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "mvver-model")
      throw Error(ErrorCode::parse_error, "not an mvver model");
    if (j.at("version").get<int>() != 1)
      throw Error(ErrorCode::parse_error, "unsupported model version");
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.dim = j.at("dim").get<int>();
    m.num_classes = j.at("num_classes").get<int>();
    m.hidden_units = j.at("hidden_units").get<int>();
    m.shift = j.value("shift", std::vector<double>{});
    m.scale = j.value("scale", std::vector<double>{});
    m.params = j.at("params").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::parse_error, std::string("model: ") + ex.what());
  }
  m.validate();
  return m;
}

}  // namespace mvver
