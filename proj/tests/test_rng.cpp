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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace riseq;

TEST_CASE("engine matches the standard mt19937_64 sequence")
{
    Rng rng(5489);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i)
        v = rng.next_u64();
    CHECK(v == 9981545732273789042ULL);
}

TEST_CASE("same seed gives the same stream")
{
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i)
    {
        CHECK(a.normal() == b.normal());
        CHECK(a.uniform() == b.uniform());
    }
}

TEST_CASE("named streams are reproducible and distinct")
{
    Rng a = Rng::stream(7, "channel", 0);
    Rng b = Rng::stream(7, "channel", 0);
    Rng c = Rng::stream(7, "channel", 1);
    Rng d = Rng::stream(7, "noise", 0);
    Rng e = Rng::stream(8, "channel", 0);
    const std::uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
    CHECK(va != c.next_u64());
    CHECK(va != d.next_u64());
    CHECK(va != e.next_u64());
}

TEST_CASE("hash helpers")
{
    CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
    CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("uniform stays in [0, 1) with the right moments")
{
    Rng rng(1);
    const int n = 200000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(sum2 / n - mean * mean - 1.0 / 12.0) < 1e-3);
}

TEST_CASE("normal has zero mean and unit variance")
{
    Rng rng(2);
    const int n = 200000;
    double sum = 0.0;
    double sum2 = 0.0;
    double sum4 = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
        sum4 += z * z * z * z;
    }
    CHECK(std::abs(sum / n) < 3.0 / std::sqrt(n));
    // Var(z^2) = 2.
    CHECK(std::abs(sum2 / n - 1.0) < 3.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(sum4 / n - 3.0) < 0.1);
}

TEST_CASE("complex normal splits the variance evenly")
{
    Rng rng(3);
    const int n = 100000;
    const double var = 2.5;
    double re2 = 0.0;
    double im2 = 0.0;
    double cross = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const auto z = rng.complex_normal(var);
        re2 += z.real() * z.real();
        im2 += z.imag() * z.imag();
        cross += z.real() * z.imag();
    }
    // Each squared component has variance 2 (var/2)^2.
    const double tol = 3.0 * std::sqrt(2.0) * (var / 2.0) / std::sqrt(n);
    CHECK(std::abs(re2 / n - var / 2.0) < tol);
    CHECK(std::abs(im2 / n - var / 2.0) < tol);
    CHECK(std::abs(cross / n) < 3.0 * (var / 2.0) / std::sqrt(n));
}

TEST_CASE("index is uniform over its range")
{
    Rng rng(4);
    const int bins = 10;
    const int n = 100000;
    std::vector<int> counts(bins, 0);
    for (int i = 0; i < n; ++i)
    {
        const auto k = rng.index(bins);
        REQUIRE(k < static_cast<std::uint64_t>(bins));
        ++counts[k];
    }
    double chi2 = 0.0;
    const double expected = static_cast<double>(n) / bins;
    for (int c : counts)
        chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 27.88); // 99.9% quantile, 9 degrees of freedom

    CHECK(rng.index(1) == 0);
    CHECK_THROWS_AS(rng.index(0), std::invalid_argument);
}
