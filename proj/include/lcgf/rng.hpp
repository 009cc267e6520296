#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace lcgf {

/// Philox4x32-10 block function (Salmon et al., SC'11): maps a 128-bit counter
/// and a 64-bit key to 128 pseudorandom bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer, used to derive stream ids.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Tags separating the random streams of different models.
enum class StreamTag : std::uint64_t {
  environment = 1,
  gff = 2,
  brw = 3,
  mbrw = 4,
  approx = 5,
  audit = 6,
};

/// stream id = mix(master_seed, replicate_id, model tag).
constexpr std::uint64_t stream_id(std::uint64_t master_seed, std::uint64_t replicate_id, StreamTag tag) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ replicate_id);
  return splitmix64(h ^ (static_cast<std::uint64_t>(tag) * 0xd1b54a32d192ed03ull));
}

/// Derive an independent child stream (e.g. per component of a composite field).
constexpr std::uint64_t child_stream(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(splitmix64(parent) ^ (index + 0x632be59bd9b4e019ull));
}

/// Counter-based random stream: the n-th output depends only on (stream id, n),
/// so replicate results do not depend on scheduling.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  explicit CounterStream(std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (cursor_ == 2) refill();
    return buffer_[cursor_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Standard normal deviate.
  double normal() { return normal_(*this); }

  std::uint64_t blocks_consumed() const { return block_; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int cursor_ = 2;
  boost::random::normal_distribution<double> normal_;
};

/// Uniform on [0, 1) from the top 53 bits of a word.
constexpr double to_unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace lcgf
