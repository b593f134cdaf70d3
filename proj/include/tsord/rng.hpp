#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace tsord {

/// Counter-keyed pseudo-random stream (splitmix64 core). A stream is derived
/// from a seed plus up to three key words, so independent work items (kernel
/// index, fold id, resample id, ...) build their own generator instead of
/// drawing from shared sequential state. Identical keys give identical
/// streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(derive(0x9e3779b97f4a7c15ull, seed)) {}
  Rng(std::uint64_t seed, std::uint64_t k1) : Rng(seed) { state_ = derive(state_, k1); }
  Rng(std::uint64_t seed, std::uint64_t k1, std::uint64_t k2) : Rng(seed, k1) {
    state_ = derive(state_, k2);
  }
  Rng(std::uint64_t seed, std::uint64_t k1, std::uint64_t k2, std::uint64_t k3)
      : Rng(seed, k1, k2) {
    state_ = derive(state_, k3);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Unbiased integer in [0, n), n > 0. Multiply-shift with rejection.
  std::uint64_t next_below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Integer in [lo, hi], inclusive.
  long uniform_int(long lo, long hi) {
    return lo + static_cast<long>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  /// Standard normal (Box-Muller, second value cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  /// Fisher-Yates with this stream; identical results on every platform,
  /// unlike std::shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t derive(std::uint64_t h, std::uint64_t k) {
    std::uint64_t z = h ^ (k + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// FNV-1a 64-bit, used to key streams by dataset or method name.
inline std::uint64_t hash64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace tsord
