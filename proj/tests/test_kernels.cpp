#include <gtest/gtest.h>

#include "helpers.hpp"
#include "mvver/kernels.hpp"

using namespace mvver;

namespace {

std::vector<Model> some_models() {
  auto ds = mvver::testing::blobs(4, 40, 3, 3.0, 5);
  std::vector<Model> models;
  for (std::uint64_t s = 0; s < 3; ++s) {
    auto cfg = mvver::testing::quick_softmax(s);
    cfg.epochs = 5;
    if (s == 2) {
      cfg.kind = ModelKind::mlp;
      cfg.hidden_units = 8;
    }
    models.push_back(fit(ds, cfg));
  }
  return models;
}

}  // namespace

TEST(Kernels, PredictionsMatchSerial) {
  auto models = some_models();
  auto ds = mvver::testing::blobs(4, 100, 3, 3.0, 6);
  auto rows = kernels::rows_of(ds.samples);
  EXPECT_EQ(kernels::predict_labels(models[0], rows), kernels::predict_labels_serial(models[0], rows));
  EXPECT_EQ(kernels::predict_views(models, rows), kernels::predict_views_serial(models, rows));
}

TEST(Kernels, EntropyMatchesSerialBitForBit) {
  auto models = some_models();
  auto ds = mvver::testing::blobs(4, 100, 3, 3.0, 7);
  auto rows = kernels::rows_of(ds.samples);
  for (bool bits : {false, true})
    EXPECT_EQ(kernels::score_entropy(models[2], rows, bits),
              kernels::score_entropy_serial(models[2], rows, bits));
}

TEST(Kernels, FitAllMatchesSerial) {
  auto ds = mvver::testing::blobs(3, 30, 2, 5.0, 1);
  auto parts = stratified_split(ds, 3, 2);
  std::vector<ClassifierConfig> cfgs;
  for (std::uint64_t s = 0; s < 3; ++s) cfgs.push_back(mvver::testing::quick_softmax(s));
  EXPECT_EQ(kernels::fit_all(parts, cfgs), kernels::fit_all_serial(parts, cfgs));
}

TEST(Kernels, FitAllPropagatesErrors) {
  auto ds = mvver::testing::blobs(3, 30, 2, 5.0, 1);
  std::vector<LabeledDataset> parts{ds, mvver::testing::tiny({0, 0}, 1)};
  std::vector<ClassifierConfig> cfgs(2);
  EXPECT_EQ(mvver::testing::code_of([&] { kernels::fit_all(parts, cfgs); }),
            ErrorCode::invalid_argument);
}

TEST(Kernels, EmptyRows) {
  auto models = some_models();
  kernels::FeatureRows none;
  EXPECT_TRUE(kernels::predict_views(models, none).empty());
  EXPECT_TRUE(kernels::score_entropy(models[0], none).empty());
}
