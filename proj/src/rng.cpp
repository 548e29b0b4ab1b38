// SPDX-License-Identifier: Apache-2.0
//
// riseq: simulation and optimization of RIS-based channel equalization
// Copyright (C) 2026 The riseq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "riseq/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace riseq
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text)
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text)
    {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

Rng Rng::stream(std::uint64_t master_seed, std::string_view name, std::uint64_t index)
{
    return Rng(splitmix64(master_seed ^ splitmix64(fnv1a64(name) + index)));
}

std::uint64_t Rng::next_u64()
{
    return engine_();
}

double Rng::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi)
{
    return lo + (hi - lo) * uniform();
}

double Rng::normal()
{
    if (spare_normal_)
    {
        double z = *spare_normal_;
        spare_normal_.reset();
        return z;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

double Rng::normal(double mean, double stddev)
{
    return mean + stddev * normal();
}

std::complex<double> Rng::complex_normal(double variance)
{
    const double s = std::sqrt(0.5 * variance);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

std::uint64_t Rng::index(std::uint64_t n)
{
    if (n == 0)
        throw std::invalid_argument("Rng::index: empty range");
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = next_u64();
    while (x >= limit)
        x = next_u64();
    return x % n;
}

} // namespace riseq
