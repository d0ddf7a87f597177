#pragma once

#include <set>
#include <vector>

#include "mvver/classifier.hpp"
#include "mvver/dataset.hpp"
#include "mvver/error.hpp"
#include <gtest/gtest.h>

namespace mvver::testing {

inline LabeledDataset blobs(int classes, int per_class, int dim, double sep, std::uint64_t seed) {
  return make_blobs({classes, per_class, dim, sep, 1.0, seed}).data;
}

inline ClassifierConfig quick_softmax(std::uint64_t seed = 0) {
  ClassifierConfig c;
  c.batch_size = 8;
  c.seed = seed;
  return c;
}

inline std::set<SampleId> id_set(const LabeledDataset& ds) {
  auto ids = ds.ids();
  return {ids.begin(), ids.end()};
}

// Hand-built dataset: one sample per label, features = {i, -i}.
inline LabeledDataset tiny(std::vector<ClassLabel> labels, int classes) {
  LabeledDataset ds;
  ds.num_classes = classes;
  ds.dim = 2;
  for (std::size_t i = 0; i < labels.size(); ++i)
    ds.samples.push_back({static_cast<SampleId>(i), {double(i), -double(i)}, labels[i]});
  return ds;
}

// Code of the mvver::Error thrown by fn.
ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no mvver::Error thrown";
  return ErrorCode::io_error;
}

}  // namespace mvver::testing
