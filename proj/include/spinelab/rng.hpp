#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace spinelab {

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Key of an independent substream identified by (parent key, tag).
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t tag) {
  return mix64(mix64(parent ^ 0x6a09e667f3bcc909ULL) + mix64(tag + 0x9e3779b97f4a7c15ULL));
}

/// FNV-1a, used to turn names into substream tags.
constexpr std::uint64_t hash_name(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based stream: the n-th draw is mix64(key + (n + 1) * golden).
/// Streams are cheap value types, so every individual, spine replica or grid
/// point owns one derived from its identity rather than from visit order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }
  std::uint64_t draws() const { return counter_; }

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_positive() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Unit-mean exponential variate.
  double exponential() { return -std::log(uniform_positive()); }

  RandomStream split(std::uint64_t tag) const { return RandomStream(derive_key(key_, tag)); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace spinelab
