#pragma once

#include <array>
#include <cstdint>

namespace pwalk {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Streams used by the simulator: key = (seed low word, seed high word),
/// counter = (block, trial low word, trial high word, 0). One block yields four
/// words, i.e. two uniforms; step k of a trial draws from block k / 2.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      ctr = round(ctr, key);
    }
    return ctr;
  }

  /// 53-bit uniform in [0, 1) from two words.
  static constexpr double to_unit(std::uint32_t a, std::uint32_t b) noexcept {
    return (static_cast<double>(a >> 5) * 67108864.0 + static_cast<double>(b >> 6)) * (1.0 / 9007199254740992.0);
  }

  static constexpr Key key_for_seed(std::uint64_t seed) noexcept {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static constexpr Counter round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Uniform stream of one trial.
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t trial) noexcept
      : key_(Philox4x32::key_for_seed(seed)),
        lo_(static_cast<std::uint32_t>(trial)),
        hi_(static_cast<std::uint32_t>(trial >> 32)) {}

  double next() noexcept {
    if (pos_ == 0) buf_ = Philox4x32::generate({block_++, lo_, hi_, 0u}, key_);
    const double u = Philox4x32::to_unit(buf_[pos_], buf_[pos_ + 1]);
    pos_ = (pos_ + 2) & 3;
    return u;
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t lo_;
  std::uint32_t hi_;
  std::uint32_t block_ = 0;
  unsigned pos_ = 0;
  Philox4x32::Counter buf_{};
};

}  // namespace pwalk
