#include "ldhom/rng.hpp"

#include <cmath>
#include <random>

namespace ldhom {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag) {
  return mix64(master_seed ^ mix64(tag));
}

Rng::Rng(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {}

void Rng::refill() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(master_seed_),
                                            static_cast<std::uint32_t>(master_seed_ >> 32)};
  buffer_ = philox4x32(ctr, key);
  ++block_;
  next_ = 0;
}

Rng::result_type Rng::operator()() {
  if (next_ == 4) refill();
  return buffer_[next_++];
}

double Rng::uniform() {
  const std::uint64_t a = (*this)() >> 5;  // 27 bits
  const std::uint64_t b = (*this)() >> 6;  // 26 bits
  // (k + 0.5) / 2^53 never hits 0 or 1.
  return (static_cast<double>((a << 26) | b) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(*this);
}

double Rng::gamma(double shape, double scale) {
  std::gamma_distribution<double> dist(shape, scale);
  return dist(*this);
}

std::uint64_t geometric_from_uniform(double u, double p) {
  if (p >= 1.0) return 1;
  const double k = std::ceil(std::log1p(-u) / std::log1p(-p));
  return k < 1.0 ? 1 : static_cast<std::uint64_t>(k);
}

std::uint64_t Rng::geometric(double p) { return geometric_from_uniform(uniform(), p); }

}  // namespace ldhom
