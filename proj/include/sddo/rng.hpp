#pragma once

#include <array>
#include <cstdint>

#include "sddo/normal.hpp"

namespace sddo {

namespace detail {

// Philox4x32-10 block cipher (Salmon et al., SC 2011). Counter-based, so
// draws are addressable: a stream is identified by its counter/key layout
// rather than by how many values were consumed before it.
struct Philox4x32 {
  static constexpr std::uint32_t kW32A = 0x9E3779B9u;
  static constexpr std::uint32_t kW32B = 0xBB67AE85u;
  static constexpr std::uint32_t kM4x32A = 0xD2511F53u;
  static constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;

  static void round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM4x32A) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM4x32B) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t out[4] = {hi1 ^ ctr[1] ^ key[0], lo1,
                                  hi0 ^ ctr[3] ^ key[1], lo0};
    ctr[0] = out[0];
    ctr[1] = out[1];
    ctr[2] = out[2];
    ctr[3] = out[3];
  }

  static std::array<std::uint32_t, 4> block(const std::uint32_t counter[4],
                                            const std::uint32_t key_in[2]) {
    std::uint32_t ctr[4] = {counter[0], counter[1], counter[2], counter[3]};
    std::uint32_t key[2] = {key_in[0], key_in[1]};
    for (int i = 0; i < 10; ++i) {
      round(ctr, key);
      key[0] += kW32A;
      key[1] += kW32B;
    }
    return {ctr[0], ctr[1], ctr[2], ctr[3]};
  }
};

}  // namespace detail

/// Substream labels used by the trial engine. Streams with different labels
/// are independent by construction of the counter layout.
enum : std::uint32_t {
  kStreamAccrual = 0,   // per-arrival jitter, entity = arrival index
  kStreamBlocks = 1,    // randomization-block shuffles, entity = block index
  kStreamPatient = 2,   // per-patient latent draws, entity = arrival index
  kStreamBlocksPost = 3 // post-interim block shuffles
};

/// Deterministic, counter-based random stream identified by
/// (seed, replicate_index, substream_label, entity). Two streams built from
/// the same identifiers yield identical sequences on any thread; streams
/// with different identifiers are independent.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t replicate_index,
               std::uint32_t substream_label, std::uint32_t entity = 0)
      : replicate_(replicate_index),
        substream_(substream_label),
        entity_(entity) {
    key_[0] = static_cast<std::uint32_t>(seed);
    key_[1] = static_cast<std::uint32_t>(seed >> 32);
  }

  /// A fresh stream for a sub-entity (e.g. patient n) of the same substream.
  RandomStream at_entity(std::uint32_t entity) const {
    RandomStream s = *this;
    s.entity_ = entity;
    s.block_ = 0;
    s.have_ = 0;
    return s;
  }

  std::uint64_t next_u64() {
    if (have_ == 0) refill();
    --have_;
    return buf_[have_];
  }

  /// Uniform draw strictly inside (0,1): bin midpoints of a 2^53 grid.
  double next_double() {
    const std::uint64_t u = next_u64();
    return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal() { return normal_quantile(next_double()); }

  /// Uniform integer in [0, n) via 128-bit multiply-shift.
  std::uint32_t next_below(std::uint32_t n) {
    const unsigned __int128 prod =
        static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint32_t>(prod >> 64);
  }

 private:
  void refill() {
    const std::uint32_t counter[4] = {block_, entity_, substream_, replicate_};
    const auto out = detail::Philox4x32::block(counter, key_);
    buf_[0] = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    buf_[1] = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    have_ = 2;
    ++block_;
  }

  std::uint32_t key_[2];
  std::uint32_t replicate_;
  std::uint32_t substream_;
  std::uint32_t entity_;
  std::uint32_t block_ = 0;
  std::uint64_t buf_[2] = {0, 0};
  int have_ = 0;
};

}  // namespace sddo
