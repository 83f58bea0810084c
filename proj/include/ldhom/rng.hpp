#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ldhom {

/// Philox4x32-10 block function. Maps a 128-bit counter and a 64-bit key to
/// 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finaliser; used to derive independent master seeds from tags.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag);

/// Counter-based random stream keyed by (master_seed, stream_id).
///
/// The key is the master seed; the upper half of the counter is the stream id
/// and the lower half counts blocks, so two streams never share state and a
/// stream's draws do not depend on how other streams are interleaved.
/// Satisfies UniformRandomBitGenerator so it can drive <random> distributions.
class Rng {
 public:
  using result_type = std::uint32_t;

  Rng(std::uint64_t master_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  double gamma(double shape, double scale);
  double chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }
  /// Geometric on {1, 2, ...}: P(k) = p (1-p)^(k-1).
  std::uint64_t geometric(double p);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t blocks_used() const { return block_; }

 private:
  void refill();

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int next_ = 4;
};

/// CDF inversion for the geometric law on {1, 2, ...}; u in (0, 1).
std::uint64_t geometric_from_uniform(double u, double p);

}  // namespace ldhom
