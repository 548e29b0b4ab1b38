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

#include "riseq/rng.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace riseq
{

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kSpeedOfLight = 299792458.0;

// Raised when an argument lies outside the mathematical domain of an operation
// (non-positive distance, non-positive scale, all-zero pulse, ...).
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Raised on mismatched vector/matrix dimensions.
class DimensionError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2 &, const Vec2 &) = default;
};

double distance(Vec2 a, Vec2 b);

// Positions are in meters. The RIS is a uniform linear array of `elements` patches with spacing
// `element_spacing`; the BS illuminates it at normal incidence.
struct Geometry
{
    Vec2 bs{0.0, 0.0};
    Vec2 ris{10.0, 0.0};
    Vec2 ue{-20.0, -20.0};
    double element_spacing = 0.02;
    int elements = 100;
    double carrier_hz = 3.5e9;
    double light_speed = kSpeedOfLight;

    void validate() const;

    double d_bu() const { return distance(bs, ue); }
    double d_br() const { return distance(bs, ris); }
    double d_ru() const { return distance(ris, ue); }

    // Signed angle at the RIS between the incidence direction (towards the BS) and the
    // direction towards the UE, in radians within (-pi, pi].
    double theta_bru() const;

    // Element coordinates along the array axis, u_m = m * element_spacing.
    std::vector<double> element_positions() const;

    friend bool operator==(const Geometry &, const Geometry &) = default;
};

struct FadingParams
{
    double kappa = 10.0;          // Rician factor of the cascaded link; +inf is pure LoS
    int delayed_paths = 10;       // n_r; the pulse has 2 * n_r ISI taps
    double pdp_rate = 0.5;        // sigma^2(k) = exp(-pdp_rate * k)
    double pathloss_exponent = 2.0;
    double gain_db = -43.0;       // G, direct link
    double ris_gain_db = -43.0;   // G', cascaded link
    double noise_dbm = -96.0;
    bool direct_link = true;      // false removes h_BU entirely

    void validate() const;

    int isi_terms() const { return 2 * delayed_paths; }
    int taps() const { return isi_terms() + 1; }
    double tap_variance(int k) const;
    double noise_power() const;

    friend bool operator==(const FadingParams &, const FadingParams &) = default;
};

// One coherence block. Reflection coefficients are applied later, see received_pulse().
struct ChannelRealization
{
    CVector direct;   // h_BU, L+1 taps
    CMatrix cascaded; // h_BRU, M x (L+1)
    double beta_bu = 0.0;
    double beta_bru = 0.0;

    int elements() const { return static_cast<int>(cascaded.rows()); }
    int taps() const { return static_cast<int>(direct.size()); }
    void validate() const;
};

struct PulseResponse
{
    CVector samples;              // y_0 ... y_L
    double sample_period = 16.3e-9;

    int taps() const { return static_cast<int>(samples.size()); }
};

double db_to_linear(double db);

// 10^(gain_db/10) * prod(d_i^-exponent). Throws DomainError on a non-positive distance.
double path_loss(double gain_db, std::span<const double> distances, double exponent);

// [1, e^{j w}, ..., e^{j (M-1) w}] with w = 2 pi d_x (f_c / c) sin(theta).
CVector steering_vector(double theta, int elements, double spacing, double carrier_hz,
                        double light_speed = kSpeedOfLight);

double sinc(double x);

// [R]_{n,m} = sinc(2 |u_n - u_m| f_c / c).
Eigen::MatrixXd spatial_correlation(std::span<const double> positions, double carrier_hz,
                                    double light_speed = kSpeedOfLight);

// Symmetric square root of a PSD matrix. Eigenvalues in [-1e-10, 0) are clamped to zero; anything
// more negative throws DomainError.
Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd &r);

// Draws channel realizations for a fixed array. The correlation square root depends only on the
// array layout and carrier, so it is computed once per sampler.
class ChannelSampler
{
public:
    ChannelSampler(const Geometry &geometry, const FadingParams &fading);

    // Uses the sampler's geometry with the UE moved to `ue`.
    ChannelRealization sample(Rng &rng, Vec2 ue) const;
    ChannelRealization sample(Rng &rng) const { return sample(rng, geometry_.ue); }

    const Geometry &geometry() const { return geometry_; }
    const FadingParams &fading() const { return fading_; }
    const Eigen::MatrixXd &correlation_sqrt() const { return correlation_sqrt_; }

private:
    Geometry geometry_;
    FadingParams fading_;
    Eigen::MatrixXd correlation_sqrt_;
};

ChannelRealization sample_channels(Rng &rng, const Geometry &geometry, const FadingParams &fading);

// y_k = h_BU[k] + sum_m gamma_m h_BRU[m][k] (+ CN(0, noise_power) per sample).
PulseResponse received_pulse(const ChannelRealization &channel, const CVector &gamma);
PulseResponse received_pulse(const ChannelRealization &channel, const CVector &gamma, double noise_power,
                             Rng &rng);

} // namespace riseq
