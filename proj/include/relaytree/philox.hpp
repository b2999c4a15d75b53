#pragma once

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
// Output is a pure function of (counter, key), so any trial's random stream
// can be regenerated independently of execution order.

#include <array>
#include <cstdint>

namespace relaytree {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr int kRounds = 10;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int r = 0; r < kRounds; ++r) {
      if (r > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr Counter round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
            static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
            static_cast<std::uint32_t>(p0)};
  }
};

/// 64-bit words for one (seed, stream) pair: counter = (stream, block index).
class StreamWords {
 public:
  StreamWords(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::uint64_t next() {
    if (have_ == 0) refill();
    --have_;
    return buffer_[have_];
  }

 private:
  void refill() {
    const Philox4x32::Counter ctr{
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32),
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>(block_ >> 32)};
    const auto out = Philox4x32::generate(ctr, key_);
    ++block_;
    // Consumed high index first: buffer_[1] then buffer_[0].
    buffer_[0] = (std::uint64_t{out[3]} << 32) | out[2];
    buffer_[1] = (std::uint64_t{out[1]} << 32) | out[0];
    have_ = 2;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int have_ = 0;
};

}  // namespace relaytree
