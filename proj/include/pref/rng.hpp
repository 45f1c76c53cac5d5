#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace pref {

inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Fans one master seed out to named substreams. Draws taken from one stream
// never perturb another, so e.g. feedback sampling stays fixed while the
// algorithm's own draws change.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index = 0) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s = a ^ hash_tag(tag);
  std::uint64_t b = splitmix64(s);
  s = b + 0x9e3779b97f4a7c15ULL * (index + 1);
  return splitmix64(s);
}

// Deterministic draws with a fixed consumption contract: every sampler below
// consumes exactly one engine output, independent of the outcome.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // [0, 1)
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // {0, .., n-1}, n >= 1
  int uniform_int(int n) {
    return static_cast<int>(
        (static_cast<unsigned __int128>(eng_()) * static_cast<std::uint64_t>(n)) >> 64);
  }

  // probs must sum to 1; ties on the boundary resolve to the earlier index
  int pick_cdf(const std::vector<double>& probs) {
    double u = uniform01();
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      c += probs[i];
      if (u < c) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace pref
