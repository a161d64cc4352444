#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace cgnls {

// Deterministic random streams. std::mt19937_64 output is fully specified by
// the standard; the distribution transforms below are hand-rolled so that the
// same seed yields the same samples on every platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return v % n;
  }

  /// Standard normal via Box-Muller (pairwise, second value cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Derives an independent stream seed from a master seed and a purpose tag,
/// so that e.g. collocation sampling never perturbs weight initialization.
inline std::uint64_t stream_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
  for (const char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return detail::splitmix64(detail::splitmix64(master ^ h) + index);
}

}  // namespace cgnls
