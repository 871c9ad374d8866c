// Copyright 2026 The rstump Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace rstump {

// std::mt19937_64 and std::seed_seq are fully specified by the standard, the
// distribution adaptors are not. Everything that draws random numbers goes
// through the helpers below so reports are reproducible across toolchains.
using Rng = std::mt19937_64;

// Independent stream for (seed, stream index). Permutation b of a null
// distribution uses stream b, so the result does not depend on scheduling.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

// Uniform on [0, 1) with 53 random bits.
double uniform01(Rng& rng);

// Uniform integer in [0, bound). bound must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

bool bernoulli(Rng& rng, double p);

double standard_normal(Rng& rng);

template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace rstump
