#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace predq::engine {

/// One independent random source per stochastic input, so that changing how
/// one input is consumed never perturbs the draws of another.
enum class Stream : std::uint32_t {
  kArrivals = 0,
  kService = 1,
  kPrediction = 2,
  kChoice = 3,
  kLlmShape = 4,
  kApiCalls = 5,
};

class RngStream {
 public:
  RngStream(std::uint64_t seed, Stream stream)
      : RngStream(seed, static_cast<std::uint32_t>(stream)) {}

  RngStream(std::uint64_t seed, std::uint32_t stream_id)
      : seed_(seed), stream_id_(stream_id), engine_(mix(seed, stream_id)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint32_t stream_id() const { return stream_id_; }

  /// Uniform on the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Exponential with the given mean; strictly positive.
  double exponential(double mean) { return -mean * std::log(uniform01()); }

  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint32_t stream) {
    // splitmix64 over (seed, stream) so neighbouring seeds decorrelate
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(stream) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint32_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace predq::engine
