#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mvver {

/// Mixes a base seed with a list of stream tags (iteration, stage, view, ...)
/// into an independent 64-bit seed. Uses the splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> tags);

/// Seeded generator with platform-independent draws. std::*_distribution
/// output differs between standard libraries, so the draws are done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal (Box-Muller, one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

template <class Container>
void shuffle(Container& c, Rng& rng) {
  using std::swap;
  for (std::size_t i = c.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    swap(c[i - 1], c[j]);
  }
}

}  // namespace mvver
