#pragma once

#include <array>
#include <cstdint>

namespace sparkspread {

// Philox4x32-10 counter-based generator (Salmon et al. 2011), pinned as the
// repo-wide generator so that seeded outputs never change across releases,
// platforms, or thread counts. The 64-bit seed is the key; the 128-bit
// counter carries (draw index, stream index). Each block yields 4x32 bits.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint64_t stream,
                                        std::uint64_t counter);

// Derives an unrelated child seed, used to give sweeps and sub-experiments
// their own seed namespaces (splitmix64 over seed XOR salt).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

// Sequential view over one (seed, stream) substream. Streams with distinct
// ids are independent; a stream's output depends only on (seed, stream),
// never on how many other streams exist, which makes per-path substreams
// prefix-stable when the path count grows and invariant under threading.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  // uniform on (0,1): 53 mantissa bits plus a half-ulp offset, never 0 or 1
  double uniform();

  // standard normal via Box-Muller; generated in pairs, one is cached
  double normal();

  // Poisson count by CDF inversion; mean must lie in [0, 500]
  int poisson(double mean);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 2;  // 2 uniforms per block; 2 means "buffer empty"
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace sparkspread
