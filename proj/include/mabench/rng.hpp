#pragma once

// Seeded RNG wrapper. mt19937_64 has a standard-defined sequence, so every
// draw here is reproducible across builds; all sampling in the generators
// must go through this class.

#include <cstdint>
#include <random>
#include <vector>

namespace mabench {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform draw in [0, n). n must be > 0.
  std::size_t bounded(std::size_t n) { return std::size_t(next() % n); }

  /// Uniform double in [0, 1).
  double uniform() {
    return double(next() >> 11) * (1.0 / 9007199254740992.0);  // 53 bits
  }

  bool coin() { return (next() & 1) != 0; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = bounded(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  /// `k` distinct indices from [0, n), order randomized.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    shuffle(idx);
    idx.resize(std::min(k, n));
    return idx;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mabench
