#pragma once

#include <cstdint>
#include <random>

namespace ompath {

/// Deterministic per-stream generator: stream k of a given seed always yields
/// the same sequence, independent of how work is scheduled across streams.
std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t stream);

/// Standard normal draws with an explicit Box-Muller transform so that the
/// produced sequence depends only on the generator state, not on the standard
/// library implementation.
class NormalSampler {
 public:
  explicit NormalSampler(std::mt19937_64 gen) : gen_(std::move(gen)) {}
  NormalSampler(std::uint64_t seed, std::uint64_t stream) : gen_(rng_stream(seed, stream)) {}

  double operator()();

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ompath
