#pragma once

#include <cstdint>
#include <limits>

namespace geogic {

// SplitMix64 finalizer. Every seed in the project is derived through this
// function so that streams can be regenerated from (master seed, path).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw k of a stream with key K is mix64(K + k*phi).
/// Draws depend only on (key, counter), never on which thread asks for them.
class StreamRng {
public:
  using result_type = std::uint64_t;

  explicit constexpr StreamRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    return mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stream identifiers within one replicate.
enum class Stream : std::uint64_t {
  eta = 1,
  epsilon = 2,
  zeta = 3,
  regressor_base = 16,  // column j uses regressor_base + j
};

/// A node in the seed derivation tree. The replicate key used by the Monte
/// Carlo engine is SeedKey{master}.child(n_index).child(delta_index)
/// .child(replicate), and each random stream is stream(id) below it.
class SeedKey {
public:
  explicit constexpr SeedKey(std::uint64_t value) noexcept : value_(value) {}

  constexpr SeedKey child(std::uint64_t index) const noexcept {
    return SeedKey{mix64(value_ ^ mix64(index + 0x632be59bd9b4e019ULL))};
  }

  constexpr StreamRng stream(std::uint64_t id) const noexcept {
    return StreamRng{child(id).value_};
  }
  constexpr StreamRng stream(Stream id) const noexcept {
    return stream(static_cast<std::uint64_t>(id));
  }

  constexpr std::uint64_t value() const noexcept { return value_; }

private:
  std::uint64_t value_;
};

}  // namespace geogic
