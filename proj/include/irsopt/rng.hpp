#ifndef IRSOPT_RNG_HPP_
#define IRSOPT_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace irsopt {

/// Splittable seed tree. Every random quantity in the library is drawn from a stream
/// keyed by (master seed, tag path), so draws never depend on evaluation order or on
/// how many other quantities were generated. Children are derived with the SplitMix64
/// finalizer; leaf streams are std::mt19937_64 engines seeded with the derived key.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  std::uint64_t key() const { return key_; }

  SplitRng child(std::uint64_t tag) const { return SplitRng(Raw{}, mix(key_ ^ mix(tag + 0x9e3779b97f4a7c15ULL))); }
  SplitRng child(std::string_view tag) const { return child(fnv1a(tag)); }
  template <typename... Rest>
  SplitRng child(std::string_view tag, std::uint64_t index, Rest... rest) const {
    SplitRng c = child(tag).child(index);
    if constexpr (sizeof...(rest) > 0)
      return c.child_indices(rest...);
    else
      return c;
  }

  std::mt19937_64 engine() const { return std::mt19937_64(key_); }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  struct Raw {};
  SplitRng(Raw, std::uint64_t key) : key_(key) {}

  template <typename... Rest>
  SplitRng child_indices(std::uint64_t index, Rest... rest) const {
    SplitRng c = child(index);
    if constexpr (sizeof...(rest) > 0)
      return c.child_indices(rest...);
    else
      return c;
  }

  std::uint64_t key_;
};

}  // namespace irsopt

#endif  // IRSOPT_RNG_HPP_
