#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace housereg {

/// std::mt19937_64 with hand-written index, uniform, normal and shuffle draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, bound) by rejection; bound > 0.
  std::uint64_t index(std::uint64_t bound);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller (both deviates used).
  double normal();

  /// Fisher-Yates, walking from the back.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Index drawn with probability proportional to weights.
  std::size_t categorical(const std::vector<double>& weights);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace housereg
