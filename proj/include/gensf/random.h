// Copyright 2026 The GenSF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GENSF_RANDOM_H_
#define GENSF_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace gensf {

using Rng = std::mt19937_64;

// Derives an independent seed for a named sub-stream ("corpus", "init",
// "shuffle", ...) so one user-facing seed drives every random component.
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view stream) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Uniform index in [0, n). Uses rejection-free multiply-shift so results do
// not depend on the standard library's distribution implementations.
inline std::size_t UniformIndex(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

// Fisher-Yates with UniformIndex.
template <typename It>
void Shuffle(It first, It last, Rng& rng) {
  const auto n = static_cast<std::size_t>(last - first);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = UniformIndex(rng, i);
    std::swap(first[i - 1], first[j]);
  }
}

// Standard normal via Box-Muller, again independent of <random>'s
// implementation-defined distributions.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double Next();

 private:
  Rng rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gensf

#endif  // GENSF_RANDOM_H_
