#include "sparkspread/rng.hpp"

#include <cmath>

#include "sparkspread/common.hpp"

namespace sparkspread {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c, std::uint32_t k0,
                         std::uint32_t k1) {
  const std::uint64_t p0 = std::uint64_t(kMult0) * c[0];
  const std::uint64_t p1 = std::uint64_t(kMult1) * c[2];
  const std::uint32_t hi0 = std::uint32_t(p0 >> 32);
  const std::uint32_t lo0 = std::uint32_t(p0);
  const std::uint32_t hi1 = std::uint32_t(p1 >> 32);
  const std::uint32_t lo1 = std::uint32_t(p1);
  c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint64_t stream,
                                        std::uint64_t counter) {
  std::array<std::uint32_t, 4> c = {
      std::uint32_t(counter), std::uint32_t(counter >> 32),
      std::uint32_t(stream), std::uint32_t(stream >> 32)};
  std::uint32_t k0 = std::uint32_t(seed);
  std::uint32_t k1 = std::uint32_t(seed >> 32);
  for (int r = 0; r < 10; ++r) {
    philox_round(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed ^ (salt * 0x9E3779B97F4A7C15ull);
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double RandomStream::uniform() {
  if (block_pos_ >= 2) {
    block_ = philox4x32(seed_, stream_, counter_++);
    block_pos_ = 0;
  }
  const int base = 2 * block_pos_++;
  const std::uint64_t bits =
      (std::uint64_t(block_[base + 1]) << 32) | block_[base];
  return (double(bits >> 11) + 0.5) * 0x1p-53;
}

double RandomStream::normal() {
  if (have_spare_normal_) {
    have_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * 3.141592653589793 * u2;
  spare_normal_ = r * std::sin(theta);
  have_spare_normal_ = true;
  return r * std::cos(theta);
}

int RandomStream::poisson(double mean) {
  require(mean >= 0.0 && mean <= 500.0, "poisson: mean must lie in [0, 500]");
  if (mean == 0.0) return 0;
  const double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  int k = 0;
  const int cap = int(mean + 12.0 * std::sqrt(mean) + 60.0);
  while (u > cdf && k < cap) {
    ++k;
    p *= mean / k;
    cdf += p;
  }
  return k;
}

}  // namespace sparkspread
