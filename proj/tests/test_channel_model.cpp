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

#include "riseq/channel_model.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using namespace riseq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

// Spacing that makes adjacent elements half a wavelength apart, so R = I.
Geometry uncorrelated(int elements)
{
    Geometry g;
    g.elements = elements;
    g.element_spacing = g.light_speed / g.carrier_hz / 2.0;
    return g;
}

Geometry small_array(int elements)
{
    Geometry g;
    g.elements = elements;
    return g;
}

} // namespace

TEST_CASE("path loss")
{
    const double unit[] = {1.0};
    CHECK(path_loss(0.0, unit, 2.0) == 1.0);
    CHECK_THAT(path_loss(-43.0, unit, 3.5), WithinRel(5.011872336272725e-05, 1e-12));
    const double two_hops[] = {10.0, 20.0};
    CHECK_THAT(path_loss(-43.0, two_hops, 2.0), WithinRel(1.2529680840681814e-09, 1e-12));

    const double zero[] = {0.0};
    const double negative[] = {5.0, -1.0};
    CHECK_THROWS_AS(path_loss(0.0, zero, 2.0), DomainError);
    CHECK_THROWS_AS(path_loss(0.0, negative, 2.0), DomainError);
}

TEST_CASE("steering vector")
{
    const CVector broadside = steering_vector(0.0, 7, 0.02, 3.5e9);
    CHECK((broadside - CVector::Ones(7)).cwiseAbs().maxCoeff() == 0.0);

    const CVector single = steering_vector(1.234, 1, 0.02, 3.5e9);
    REQUIRE(single.size() == 1);
    CHECK(single(0) == cdouble(1.0, 0.0));

    // d_x f_c / c = 0.5 at endfire gives omega = pi.
    const CVector alternating = steering_vector(std::numbers::pi / 2.0, 3, 0.5, 1.0, 1.0);
    CHECK_THAT(alternating(0).real(), WithinAbs(1.0, 1e-12));
    CHECK_THAT(alternating(1).real(), WithinAbs(-1.0, 1e-12));
    CHECK_THAT(alternating(2).real(), WithinAbs(1.0, 1e-12));
    CHECK_THAT(alternating.imag().cwiseAbs().maxCoeff(), WithinAbs(0.0, 1e-12));

    for (double theta : {-2.0, -0.3, 0.7, 3.0})
    {
        const CVector v = steering_vector(theta, 50, 0.02, 3.5e9);
        CHECK((v.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("spatial correlation")
{
    const double lambda = kSpeedOfLight / 3.5e9;

    SECTION("half-wavelength spacing is uncorrelated")
    {
        const std::vector<double> u{0.0, lambda / 2, lambda, 1.5 * lambda};
        const Eigen::MatrixXd r = spatial_correlation(u, 3.5e9);
        CHECK((r - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
    }

    SECTION("quarter-wavelength neighbours")
    {
        const std::vector<double> u{0.0, lambda / 4};
        const Eigen::MatrixXd r = spatial_correlation(u, 3.5e9);
        CHECK(r(0, 0) == 1.0);
        CHECK_THAT(r(0, 1), WithinRel(0.6366197723675814, 1e-12));
        CHECK(r(0, 1) == r(1, 0));
    }

    SECTION("default array is symmetric, unit-diagonal and PSD")
    {
        const Geometry g;
        const Eigen::MatrixXd r = spatial_correlation(g.element_positions(), g.carrier_hz);
        CHECK((r - r.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((r.diagonal().array() - 1.0).abs().maxCoeff() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
        CHECK(eig.eigenvalues().minCoeff() > -1e-10);
        const Eigen::MatrixXd s = matrix_sqrt_psd(r);
        CHECK((s * s - r).cwiseAbs().maxCoeff() < 1e-9);
    }

    CHECK(sinc(0.0) == 1.0);
    CHECK_THAT(sinc(0.5), WithinRel(2.0 / std::numbers::pi, 1e-15));
    CHECK_THAT(sinc(3.0), WithinAbs(0.0, 1e-15));
}

TEST_CASE("PSD square root")
{
    CHECK((matrix_sqrt_psd(Eigen::MatrixXd::Identity(5, 5)) - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <
          1e-15);

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    const Eigen::MatrixXd s = matrix_sqrt_psd(d);
    CHECK_THAT(s(0, 0), WithinAbs(2.0, 1e-14));
    CHECK_THAT(s(1, 1), WithinAbs(3.0, 1e-14));
    CHECK_THAT(s(0, 1), WithinAbs(0.0, 1e-14));

    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial)
    {
        Eigen::MatrixXd a(8, 5); // rank-deficient on purpose
        for (Eigen::Index i = 0; i < a.size(); ++i)
            a.data()[i] = rng.normal();
        const Eigen::MatrixXd r = a * a.transpose();
        const Eigen::MatrixXd root = matrix_sqrt_psd(r);
        CHECK((root * root - r).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK((root - root.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }

    Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(2, 2);
    indefinite(1, 1) = -1e-3;
    CHECK_THROWS_AS(matrix_sqrt_psd(indefinite), DomainError);
    Eigen::MatrixXd nearly = Eigen::MatrixXd::Identity(2, 2);
    nearly(1, 1) = -1e-12;
    CHECK_NOTHROW(matrix_sqrt_psd(nearly));
}

TEST_CASE("geometry")
{
    const Geometry g;
    CHECK_THAT(g.d_br(), WithinRel(10.0, 1e-15));
    CHECK_THAT(g.d_bu(), WithinRel(std::sqrt(800.0), 1e-15));
    CHECK_THAT(g.d_ru(), WithinRel(std::sqrt(1300.0), 1e-15));
    CHECK_THAT(g.theta_bru(), WithinRel(0.5880026035475675, 1e-12));

    Geometry bad = g;
    bad.elements = 0;
    CHECK_THROWS(bad.validate());
    bad = g;
    bad.ue = bad.ris;
    CHECK_THROWS(bad.validate());
    bad = g;
    bad.element_spacing = 0.0;
    CHECK_THROWS(bad.validate());

    FadingParams f;
    CHECK(f.isi_terms() == 20);
    CHECK(f.taps() == 21);
    CHECK(f.tap_variance(0) == 1.0);
    f.kappa = -1.0;
    CHECK_THROWS(f.validate());
}

TEST_CASE("pure line of sight gives flat tap-0 magnitudes")
{
    FadingParams f;
    f.kappa = 1e12;
    f.delayed_paths = 2;
    Rng rng(5);
    const Geometry g = uncorrelated(16);
    const ChannelRealization ch = sample_channels(rng, g, f);
    const double root_beta = std::sqrt(ch.beta_bru);
    for (int m = 0; m < 16; ++m)
        CHECK_THAT(std::abs(ch.cascaded(m, 0)), WithinRel(root_beta, 1e-5));

    f.kappa = INFINITY;
    const ChannelRealization exact = sample_channels(rng, g, f);
    for (int m = 0; m < 16; ++m)
        CHECK_THAT(std::abs(exact.cascaded(m, 0)), WithinRel(root_beta, 1e-12));
}

TEST_CASE("tap counts and shapes")
{
    FadingParams f;
    f.delayed_paths = 0;
    Rng rng(6);
    const ChannelRealization ch = sample_channels(rng, small_array(3), f);
    CHECK(ch.taps() == 1);
    CHECK(ch.cascaded.rows() == 3);
    CHECK(ch.cascaded.cols() == 1);

    f.delayed_paths = 3;
    const ChannelRealization ch7 = sample_channels(rng, small_array(5), f);
    CHECK(ch7.direct.size() == 7);
    CHECK(ch7.cascaded.rows() == 5);
    CHECK(ch7.cascaded.cols() == 7);
    CHECK(ch7.direct.allFinite());
    CHECK(ch7.cascaded.allFinite());

    f.direct_link = false;
    const ChannelRealization no_direct = sample_channels(rng, small_array(5), f);
    CHECK(no_direct.direct.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sampler is deterministic for a seed")
{
    const FadingParams f;
    const Geometry g = small_array(8);
    Rng a(99);
    Rng b(99);
    const ChannelRealization x = sample_channels(a, g, f);
    const ChannelRealization y = sample_channels(b, g, f);
    CHECK(x.direct == y.direct);
    CHECK(x.cascaded == y.cascaded);
}

TEST_CASE("channel second moments follow the power-delay profile")
{
    FadingParams f;
    f.delayed_paths = 1; // taps 0, 1, 2
    f.kappa = 3.0;
    const Geometry g = small_array(3); // 2 cm spacing: correlated elements
    const ChannelSampler sampler(g, f);
    const Eigen::MatrixXd r = spatial_correlation(g.element_positions(), g.carrier_hz);

    const int n = 100000;
    Rng rng(7);
    std::vector<double> direct_power(3, 0.0);
    std::vector<double> direct_power_sq(3, 0.0);
    std::vector<double> self(3, 0.0);
    std::vector<cdouble> cross01(3, 0.0);
    ChannelRealization ch;
    for (int i = 0; i < n; ++i)
    {
        ch = sampler.sample(rng);
        for (int k = 0; k < 3; ++k)
        {
            const double p = std::norm(ch.direct(k));
            direct_power[k] += p;
            direct_power_sq[k] += p * p;
            self[k] += std::norm(ch.cascaded(2, k));
            cross01[k] += ch.cascaded(0, k) * std::conj(ch.cascaded(1, k));
        }
    }

    for (int k = 0; k < 3; ++k)
    {
        const double expected = ch.beta_bu * f.tap_variance(k);
        const double mean = direct_power[k] / n;
        const double sd = std::sqrt(direct_power_sq[k] / n - mean * mean);
        CHECK(std::abs(mean - expected) < 3.0 * sd / std::sqrt(n));
        CHECK(std::abs(mean - expected) < 0.03 * expected);
    }

    // Taps k >= 1 are zero-mean with covariance beta sigma^2(k) R.
    for (int k = 1; k < 3; ++k)
    {
        const double scale = ch.beta_bru * f.tap_variance(k);
        CHECK_THAT(self[k] / n, WithinRel(scale, 0.03));
        CHECK_THAT((cross01[k] / double(n)).real(), WithinRel(scale * r(0, 1), 0.03));
        CHECK(std::abs((cross01[k] / double(n)).imag()) < 0.03 * scale);
    }
    // Tap 0: beta (kappa/(kappa+1) |(R^1/2 a)_m|^2 + 1/(kappa+1)) with a the steering vector.
    const CVector a = steering_vector(g.theta_bru(), 3, g.element_spacing, g.carrier_hz);
    const CVector shaped = sampler.correlation_sqrt().cast<cdouble>() * a;
    const double expected0 = ch.beta_bru * (f.kappa / (f.kappa + 1.0) * std::norm(shaped(2)) + 1.0 / (f.kappa + 1.0));
    CHECK_THAT(self[0] / n, WithinRel(expected0, 0.03));
}

TEST_CASE("received pulse")
{
    SECTION("single element, single tap")
    {
        ChannelRealization ch;
        ch.direct = CVector::Constant(1, cdouble(0.3, -0.1));
        ch.cascaded = CMatrix::Constant(1, 1, cdouble(0.5, 0.2));
        const CVector y = received_pulse(ch, CVector::Ones(1)).samples;
        CHECK(y(0) == cdouble(0.8, 0.1));
    }

    FadingParams f;
    f.delayed_paths = 3;
    Rng rng(8);
    const ChannelRealization ch = sample_channels(rng, small_array(6), f);

    SECTION("a zeroed surface leaves the direct path")
    {
        const CVector y = received_pulse(ch, CVector::Zero(6)).samples;
        CHECK((y - ch.direct).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("affine in gamma")
    {
        for (int trial = 0; trial < 50; ++trial)
        {
            CVector a(6);
            CVector b(6);
            for (int m = 0; m < 6; ++m)
            {
                a(m) = rng.complex_normal();
                b(m) = rng.complex_normal();
            }
            const CVector y0 = received_pulse(ch, CVector::Zero(6)).samples;
            const CVector ya = received_pulse(ch, a).samples;
            const CVector yb = received_pulse(ch, b).samples;
            const CVector yab = received_pulse(ch, a + b).samples;
            const double scale = ch.cascaded.cwiseAbs().maxCoeff();
            CHECK((ya + yb - y0 - yab).cwiseAbs().maxCoeff() <= 1e-12 * scale);
            CHECK((ya - y0 - ch.cascaded.transpose() * a).cwiseAbs().maxCoeff() <= 1e-12 * scale);
        }
    }

    SECTION("noise power")
    {
        const double noise = 2e-3;
        const int n = 20000;
        const CVector clean = received_pulse(ch, CVector::Ones(6)).samples;
        double power = 0.0;
        for (int i = 0; i < n; ++i)
            power += (received_pulse(ch, CVector::Ones(6), noise, rng).samples - clean).squaredNorm();
        // Each sample's |n|^2 is exponential with mean noise; 7 taps per draw.
        const double draws = 7.0 * n;
        CHECK(std::abs(power / draws - noise) < 3.0 * noise / std::sqrt(draws));
        CHECK_THROWS_AS(received_pulse(ch, CVector::Ones(6), -1.0, rng), DomainError);
    }

    CHECK_THROWS_AS(received_pulse(ch, CVector::Ones(5)), DimensionError);
}
