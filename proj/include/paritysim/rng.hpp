#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace paritysim {

using Rng = std::mt19937_64;

/// Independent generator for (seed, stream). Parallel loops give every batch
/// or grid point its own stream so results do not depend on thread count.
inline Rng derived_rng(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ull * (stream + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  std::seed_seq seq{static_cast<std::uint32_t>(z), static_cast<std::uint32_t>(z >> 32),
                    static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

/// Number of equal batches used for sampling and batch-mean standard errors.
inline constexpr int kBatchCount = 20;

/// Size of batch `b` when `total` items are split into `batches` near-equal parts.
inline std::size_t batch_size(std::size_t total, int batches, int b) {
  const std::size_t base = total / static_cast<std::size_t>(batches);
  const std::size_t extra = total % static_cast<std::size_t>(batches);
  return base + (static_cast<std::size_t>(b) < extra ? 1 : 0);
}

/// Offset of batch `b` in a contiguous split.
inline std::size_t batch_offset(std::size_t total, int batches, int b) {
  std::size_t offset = 0;
  for (int i = 0; i < b; ++i) offset += batch_size(total, batches, i);
  return offset;
}

}  // namespace paritysim
