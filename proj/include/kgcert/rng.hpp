/*
 * Copyright 2026 the kgcert authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef KGCERT_RNG_HPP_
#define KGCERT_RNG_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

namespace kgcert {

// SplitMix64 finalizer. Used for seeding and for deriving keyed substreams.
constexpr uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256++ with a fixed Box-Muller normal sampler. All randomness in the
// project goes through this class so that results are bit-reproducible across
// platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    // Expand the seed through SplitMix64, as recommended for xoshiro seeding.
    uint64_t s = seed;
    for (auto& word : state_) {
      s += 0x9e3779b97f4a7c15ull;
      word = mix64(s);
    }
  }

  // Substream keyed by (seed, a, b). Distinct keys give independent streams;
  // this is what makes per-query / per-trial parallelism schedule-independent.
  static Rng stream(uint64_t seed, uint64_t a, uint64_t b = 0) {
    uint64_t k = mix64(seed);
    k = mix64(k ^ (a * 0xd2b74407b1ce6e93ull + 1));
    k = mix64(k ^ (b * 0xca5a826395121157ull + 1));
    return Rng(k);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n).
  uint64_t below(uint64_t n) {
    const uint64_t limit = n * (UINT64_MAX / n);
    uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // One standard normal draw. Consumes exactly two uniforms (the sine branch
  // of the Box-Muller pair is discarded) so stream consumption is predictable.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Fills `out` with i.i.d. normals using full Box-Muller pairs.
  void fill_normal(std::span<double> out, double stddev = 1.0) {
    size_t i = 0;
    while (i + 1 < out.size()) {
      const double u1 = 1.0 - uniform();
      const double u2 = uniform();
      const double radius = std::sqrt(-2.0 * std::log(u1));
      out[i++] = stddev * radius * std::cos(2.0 * kPi * u2);
      out[i++] = stddev * radius * std::sin(2.0 * kPi * u2);
    }
    if (i < out.size()) out[i] = stddev * normal();
  }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (size_t i = values.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  static constexpr uint64_t rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<uint64_t, 4> state_;
};

// Fixed purposes for top-level substreams, so adding a new consumer never
// shifts the draws seen by existing ones.
enum class RngPurpose : uint64_t {
  kModelInit = 1,
  kTrainLoop = 2,
  kEvalNoise = 3,
  kCertification = 4,
  kQuerySampling = 5,
};

inline Rng purpose_stream(uint64_t seed, RngPurpose purpose, uint64_t index = 0) {
  return Rng::stream(seed, static_cast<uint64_t>(purpose), index);
}

}  // namespace kgcert

#endif  // KGCERT_RNG_HPP_
