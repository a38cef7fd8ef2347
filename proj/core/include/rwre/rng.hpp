#pragma once
// Counter-based deterministic RNG.
//
// Every random quantity in the toolkit is a pure function of
// (master_seed, role, indices..., counter).  Site marks, walker step
// streams and oracle replicates all derive their own keys, so adding or
// removing one consumer never shifts the draws seen by another.  This is
// what makes per-site laziness, seed-parallel runs and the coupled-walker
// marginal guarantee reproducible bit for bit.

#include <cstdint>
#include <limits>

namespace rwre {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer (Stafford mix13 variant).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Key derivation: fold a value into a key with full avalanche.
constexpr std::uint64_t key_combine(std::uint64_t key, std::uint64_t v) noexcept {
  return mix64(key ^ (mix64(v + kGolden) + 0x632BE59BD9B4E019ull));
}

template <class... Rest>
constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t v, Rest... rest) noexcept {
  std::uint64_t k = key_combine(key, v);
  if constexpr (sizeof...(rest) == 0)
    return k;
  else
    return derive_key(k, static_cast<std::uint64_t>(rest)...);
}

// Signed site index -> unsigned, small |x| stays small (keeps keys distinct).
constexpr std::uint64_t zigzag(long long x) noexcept {
  return (static_cast<std::uint64_t>(x) << 1) ^ static_cast<std::uint64_t>(x >> 63);
}

// Uniform double in [0,1) from 64 random bits, 53-bit mantissa.
constexpr double u01(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Stream roles.  Distinct constants give domain separation between the
// environment marks, walker streams and oracle replicates.
enum Role : std::uint64_t {
  kRoleEnv = 0xE17u,
  kRoleWalker = 0x5A1Bu,
  kRoleHatWalker = 0x8A7Fu,
  kRoleHatInit = 0x1417u,
  kRolePostExit = 0xF05Eu,
  kRoleOracle = 0x0AC1u,
  kRoleReplicate = 0x9EBBu,
  kRoleIncrement = 0x1C4Du,
};

// Counter-mode splitmix64 stream: draw n is mix64(key + n*golden), a pure
// function of (key, n).  Satisfies uniform_random_bit_generator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterRng(std::uint64_t key, std::uint64_t start = 0) noexcept
      : key_(key), ctr_(start) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<std::uint64_t>::max();
  }

  constexpr result_type operator()() noexcept {
    return mix64(key_ + (++ctr_) * kGolden);
  }

  constexpr double next_u01() noexcept { return u01((*this)()); }

  // Draw n without advancing state (counters start at 1).
  constexpr result_type at(std::uint64_t n) const noexcept {
    return mix64(key_ + n * kGolden);
  }

  constexpr std::uint64_t counter() const noexcept { return ctr_; }
  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_;
};

}  // namespace rwre
