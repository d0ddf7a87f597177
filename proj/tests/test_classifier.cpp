#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gradcheck.hpp"
#include "helpers.hpp"
#include "mvver/rng.hpp"

using namespace mvver;
using mvver::testing::code_of;

namespace {

// Softmax of W x + b in long double, computed without the library.
std::vector<long double> oracle_softmax(const Model& m, const std::vector<double>& x) {
  const int C = m.num_classes, d = m.dim;
  std::vector<long double> z(C);
  for (int c = 0; c < C; ++c) {
    long double acc = m.params[d * C + c];
    for (int j = 0; j < d; ++j) acc += static_cast<long double>(m.params[c * d + j]) * x[j];
    z[c] = acc;
  }
  long double top = z[0], sum = 0;
  for (auto v : z) top = std::max(top, v);
  for (auto& v : z) sum += (v = std::exp(v - top));
  for (auto& v : z) v /= sum;
  return z;
}

double sum_of(const ProbVector& p) {
  double s = 0;
  for (double v : p.values()) s += v;
  return s;
}

}  // namespace

TEST(Predict, ZeroModelIsUniform) {
  for (auto kind : {ModelKind::softmax, ModelKind::mlp}) {
    auto m = Model::zeros(kind, 3, 4, 5);
    auto p = predict_proba(m, std::vector<double>{1.0, -7.0, 3.5});
    for (double v : p.values()) EXPECT_DOUBLE_EQ(v, 0.25);
  }
}

TEST(Predict, LargeLogitsDoNotOverflow) {
  std::vector<double> z{1000.0, 0.0};
  auto p = ProbVector::softmax(z);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_GT(p[1], 0.0);
  EXPECT_LE(p[1], std::numeric_limits<double>::min());
  EXPECT_NEAR(sum_of(p), 1.0, 1e-15);
}

TEST(Predict, AgreesWithExtendedPrecisionOracle) {
  Rng rng(42);
  for (int t = 0; t < 200; ++t) {
    auto m = Model::initialized(ModelKind::softmax, 6, 5, 0, t);
    for (double& v : m.params) v *= 4;
    std::vector<double> x(6);
    for (double& v : x) v = rng.uniform(-3, 3);
    auto p = predict_proba(m, x);
    auto q = oracle_softmax(m, x);
    for (int c = 0; c < 5; ++c) EXPECT_NEAR(p[c], static_cast<double>(q[c]), 1e-9);
  }
}

TEST(Predict, ArgmaxAndTies) {
  EXPECT_EQ(argmax(ProbVector::from({0.2, 0.5, 0.3})), 1);
  EXPECT_EQ(argmax(ProbVector::from({0.5, 0.5})), 0);
  EXPECT_EQ(argmax(ProbVector::from({0.25, 0.375, 0.375})), 1);
}

TEST(Predict, PredictMatchesArgmaxOfProba) {
  auto m = Model::initialized(ModelKind::mlp, 4, 3, 8, 5);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(4);
    for (double& v : x) v = rng.normal();
    ASSERT_EQ(predict(m, x), argmax(predict_proba(m, x)));
  }
}

TEST(Predict, DimensionMismatch) {
  auto m = Model::zeros(ModelKind::softmax, 3, 2);
  EXPECT_EQ(code_of([&] { predict(m, std::vector<double>{1.0}); }), ErrorCode::dimension_mismatch);
}

TEST(ProbVectorTest, RejectsInvalid) {
  EXPECT_EQ(code_of([] { ProbVector::from({0.5, 0.6}); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { ProbVector::from({1.0, 0.0}); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { ProbVector::from({}); }), ErrorCode::invalid_argument);
}

TEST(CrossEntropy, Values) {
  auto one_hot = ProbVector::softmax(std::vector<double>{0.0, 1000.0, 0.0});
  EXPECT_NEAR(cross_entropy(one_hot, 1), 0.0, 1e-15);
  auto uniform = ProbVector::from({0.25, 0.25, 0.25, 0.25});
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(cross_entropy(uniform, c), 1.3862943611198906, 1e-12);
  EXPECT_NEAR(cross_entropy(ProbVector::from({0.7, 0.2, 0.1}), 2), 2.302585092994046, 1e-12);
}

TEST(CrossEntropy, FlooredAtTinyProbability) {
  auto p = ProbVector::softmax(std::vector<double>{1000.0, 0.0});
  EXPECT_NEAR(cross_entropy(p, 1), -std::log(kProbabilityFloor), 1e-9);
  EXPECT_EQ(code_of([&] { cross_entropy(p, 2); }), ErrorCode::label_out_of_range);
}

TEST(Gradient, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = mvver::testing::random_instance(seed + 1000);
    EXPECT_LT(mvver::testing::gradient_relative_error(g), 1e-4) << "seed " << seed;
  }
}

TEST(Train, SeparableBlobsFitWell) {
  auto ds = mvver::testing::blobs(3, 100, 2, 10.0, 0);
  auto r = train(ds, mvver::testing::quick_softmax());
  std::size_t hit = 0;
  for (const auto& s : ds.samples) hit += predict(r.model, s.features) == s.label;
  EXPECT_GE(hit / 300.0, 0.99);
  ASSERT_EQ(r.epoch_loss.size(), 50u);
  EXPECT_LT(r.epoch_loss.back(), r.epoch_loss.front());
}

TEST(Train, MlpFitsBlobs) {
  auto ds = mvver::testing::blobs(3, 50, 2, 10.0, 3);
  auto cfg = mvver::testing::quick_softmax();
  cfg.kind = ModelKind::mlp;
  cfg.hidden_units = 16;
  auto m = fit(ds, cfg);
  std::size_t hit = 0;
  for (const auto& s : ds.samples) hit += predict(m, s.features) == s.label;
  EXPECT_GE(hit / 150.0, 0.99);
}

TEST(Train, Deterministic) {
  auto ds = mvver::testing::blobs(3, 30, 4, 3.0, 1);
  auto cfg = mvver::testing::quick_softmax(17);
  EXPECT_EQ(fit(ds, cfg), fit(ds, cfg));
  auto other = cfg;
  other.seed = 18;
  EXPECT_NE(fit(ds, cfg).params, fit(ds, other).params);
}

TEST(Train, Preconditions) {
  auto one = mvver::testing::tiny({0, 0, 0}, 1);
  EXPECT_EQ(code_of([&] { fit(one, {}); }), ErrorCode::invalid_argument);
  LabeledDataset empty;
  empty.num_classes = 2;
  empty.dim = 2;
  EXPECT_EQ(code_of([&] { fit(empty, {}); }), ErrorCode::empty_dataset);
  ClassifierConfig bad;
  bad.learning_rate = 0;
  EXPECT_EQ(code_of([&] { fit(mvver::testing::tiny({0, 1}, 2), bad); }),
            ErrorCode::invalid_argument);
}

TEST(Train, DivergenceReported) {
  auto ds = mvver::testing::tiny({0, 1, 0, 1}, 2);
  ds.samples[0].features = {1e308, -1e308};
  ClassifierConfig cfg;
  cfg.standardize = false;
  cfg.learning_rate = 1e300;
  EXPECT_EQ(code_of([&] { fit(ds, cfg); }), ErrorCode::divergence);
}

TEST(ModelJson, RoundTrip) {
  auto ds = mvver::testing::blobs(3, 20, 3, 4.0, 2);
  auto cfg = mvver::testing::quick_softmax();
  cfg.kind = ModelKind::mlp;
  cfg.hidden_units = 4;
  auto m = fit(ds, cfg);
  EXPECT_EQ(model_from_json(model_to_json(m)), m);
  EXPECT_EQ(code_of([] { model_from_json("{}"); }), ErrorCode::parse_error);
}

TEST(ModelKindNames, Parse) {
  EXPECT_EQ(parse_model_kind("mlp"), ModelKind::mlp);
  EXPECT_EQ(to_string(ModelKind::softmax), "softmax");
  EXPECT_EQ(code_of([] { parse_model_kind("svm"); }), ErrorCode::invalid_argument);
}
