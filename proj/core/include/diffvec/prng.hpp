#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace diffvec {

// xoshiro256** seeded through splitmix64. The stream is fully specified here
// (no std:: distributions) so every experiment reproduces bit-for-bit across
// platforms and standard libraries.
class Prng {
 public:
  using result_type = std::uint64_t;

  explicit Prng(std::uint64_t seed);

  // Independent stream for `tag` under `seed`.
  static Prng split(std::uint64_t seed, std::string_view tag);
  static Prng split(std::uint64_t seed, std::uint64_t tag);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next(); }

  std::uint64_t next();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Standard normal via Box-Muller.
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t s_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t hash_tag(std::string_view tag);

}  // namespace diffvec
