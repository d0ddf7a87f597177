#pragma once

#include <cmath>
#include <vector>

#include "mvver/classifier.hpp"
#include "mvver/rng.hpp"

namespace mvver::testing {

struct GradInstance {
  Model model;
  std::vector<Sample> batch;
  double l2 = 0.0;
};

// Small random model and batch; labels and shapes drawn from `seed`.
inline GradInstance random_instance(std::uint64_t seed) {
  Rng rng(seed);
  const auto kind = rng.below(2) ? ModelKind::mlp : ModelKind::softmax;
  const int d = 1 + static_cast<int>(rng.below(5));
  const int C = 2 + static_cast<int>(rng.below(4));
  const int h = 2 + static_cast<int>(rng.below(6));
  GradInstance g{Model::initialized(kind, d, C, h, seed), {}, rng.below(2) ? 0.01 : 0.0};
  for (double& p : g.model.params) p += rng.uniform(-0.3, 0.3);  // nonzero biases too
  const int n = 1 + static_cast<int>(rng.below(6));
  for (int i = 0; i < n; ++i) {
    Sample s{i, {}, static_cast<ClassLabel>(rng.below(C))};
    for (int j = 0; j < d; ++j) s.features.push_back(rng.uniform(-2, 2));
    g.batch.push_back(std::move(s));
  }
  return g;
}

// ||analytic - numeric|| / (||analytic|| + ||numeric||), central differences.
inline double gradient_relative_error(const GradInstance& g, double step = 1e-6) {
  std::vector<const Sample*> ptrs;
  for (const auto& s : g.batch) ptrs.push_back(&s);
  std::vector<double> analytic;
  loss_and_gradient(g.model, ptrs, g.l2, &analytic);

  Model probe = g.model;
  double diff = 0, na = 0, nn = 0;
  for (std::size_t i = 0; i < probe.params.size(); ++i) {
    const double keep = probe.params[i];
    probe.params[i] = keep + step;
    const double up = loss_and_gradient(probe, ptrs, g.l2, nullptr);
    probe.params[i] = keep - step;
    const double down = loss_and_gradient(probe, ptrs, g.l2, nullptr);
    probe.params[i] = keep;
    const double numeric = (up - down) / (2 * step);
    diff += (analytic[i] - numeric) * (analytic[i] - numeric);
    na += analytic[i] * analytic[i];
    nn += numeric * numeric;
  }
  const double denom = std::sqrt(na) + std::sqrt(nn);
  return denom == 0 ? 0.0 : std::sqrt(diff) / denom;
}

}  // namespace mvver::testing
