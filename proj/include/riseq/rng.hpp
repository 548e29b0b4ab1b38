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

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace riseq
{

// Seedable random source. The engine is std::mt19937_64, whose output sequence is fixed by the
// C++ standard; the real-valued transforms below are implemented here (rather than taken from
// <random> distributions, which are implementation-defined) so a given seed yields the same
// stream with every standard library:
//   uniform()  = (next_u64() >> 11) * 2^-53                  in [0, 1)
//   normal()   = Box-Muller on (1 - uniform(), uniform()),   second value cached
//   index(n)   = rejection sampling on next_u64()
//
// Independent streams are derived from a master seed and a stream name, see Rng::stream().
class Rng
{
public:
    explicit Rng(std::uint64_t seed);

    // Stream seed = splitmix64(master ^ splitmix64(fnv1a64(name) + index)).
    static Rng stream(std::uint64_t master_seed, std::string_view name, std::uint64_t index = 0);

    std::uint64_t next_u64();
    double uniform();
    double uniform(double lo, double hi);
    double normal();
    double normal(double mean, double stddev);

    // Circularly-symmetric complex Gaussian with total variance `variance`.
    std::complex<double> complex_normal(double variance = 1.0);

    // Uniform integer in [0, n), n > 0.
    std::uint64_t index(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_normal_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

} // namespace riseq
