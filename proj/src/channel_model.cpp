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

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace riseq
{

double distance(Vec2 a, Vec2 b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

void Geometry::validate() const
{
    if (elements < 1)
        throw std::invalid_argument("geometry.elements must be >= 1, got " + std::to_string(elements));
    if (!(element_spacing > 0.0))
        throw std::invalid_argument("geometry.element_spacing must be > 0");
    if (!(carrier_hz > 0.0))
        throw std::invalid_argument("geometry.carrier_hz must be > 0");
    if (!(light_speed > 0.0))
        throw std::invalid_argument("geometry.light_speed must be > 0");
    if (!(d_bu() > 0.0) || !(d_br() > 0.0) || !(d_ru() > 0.0))
        throw std::invalid_argument("geometry: BS, RIS and UE must be at distinct positions");
}

double Geometry::theta_bru() const
{
    const Vec2 to_bs{bs.x - ris.x, bs.y - ris.y};
    const Vec2 to_ue{ue.x - ris.x, ue.y - ris.y};
    const double cross = to_bs.x * to_ue.y - to_bs.y * to_ue.x;
    const double dot = to_bs.x * to_ue.x + to_bs.y * to_ue.y;
    return std::atan2(cross, dot);
}

std::vector<double> Geometry::element_positions() const
{
    std::vector<double> u(static_cast<std::size_t>(elements));
    for (int m = 0; m < elements; ++m)
        u[static_cast<std::size_t>(m)] = m * element_spacing;
    return u;
}

void FadingParams::validate() const
{
    if (!(kappa >= 0.0))
        throw std::invalid_argument("fading.kappa must be >= 0");
    if (delayed_paths < 0)
        throw std::invalid_argument("fading.delayed_paths must be >= 0");
    if (!(pdp_rate >= 0.0))
        throw std::invalid_argument("fading.pdp_rate must be >= 0");
    if (!std::isfinite(pathloss_exponent))
        throw std::invalid_argument("fading.pathloss_exponent must be finite");
    if (!std::isfinite(gain_db) || !std::isfinite(ris_gain_db) || !std::isfinite(noise_dbm))
        throw std::invalid_argument("fading: gains and noise power must be finite");
}

double FadingParams::tap_variance(int k) const
{
    return std::exp(-pdp_rate * k);
}

double FadingParams::noise_power() const
{
    return db_to_linear(noise_dbm);
}

void ChannelRealization::validate() const
{
    if (cascaded.cols() != direct.size())
        throw DimensionError("channel: direct and cascaded tap counts differ");
    if (!direct.allFinite() || !cascaded.allFinite())
        throw DomainError("channel: non-finite tap");
}

double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

double path_loss(double gain_db, std::span<const double> distances, double exponent)
{
    double gain = db_to_linear(gain_db);
    for (double d : distances)
    {
        if (!(d > 0.0))
            throw DomainError("path_loss: distances must be positive");
        gain *= std::pow(d, -exponent);
    }
    return gain;
}

CVector steering_vector(double theta, int elements, double spacing, double carrier_hz, double light_speed)
{
    if (elements < 1)
        throw std::invalid_argument("steering_vector: elements must be >= 1");
    const double omega = 2.0 * std::numbers::pi * spacing * (carrier_hz / light_speed) * std::sin(theta);
    CVector v(elements);
    for (int m = 0; m < elements; ++m)
        v(m) = std::polar(1.0, m * omega);
    return v;
}

double sinc(double x)
{
    if (x == 0.0)
        return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

Eigen::MatrixXd spatial_correlation(std::span<const double> positions, double carrier_hz, double light_speed)
{
    const auto n = static_cast<Eigen::Index>(positions.size());
    const double wavelength = light_speed / carrier_hz;
    Eigen::MatrixXd r(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        r(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j)
        {
            const double value = sinc(2.0 * std::abs(positions[i] - positions[j]) / wavelength);
            r(i, j) = value;
            r(j, i) = value;
        }
    }
    return r;
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd &r)
{
    if (r.rows() != r.cols())
        throw DimensionError("matrix_sqrt_psd: matrix is not square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
    if (eig.info() != Eigen::Success)
        throw DomainError("matrix_sqrt_psd: eigendecomposition failed");
    Eigen::VectorXd lambda = eig.eigenvalues();
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
    {
        if (lambda(i) < -1e-10)
            throw DomainError("matrix_sqrt_psd: matrix is not positive semidefinite (eigenvalue " +
                              std::to_string(lambda(i)) + ")");
        lambda(i) = std::sqrt(std::max(lambda(i), 0.0));
    }
    const Eigen::MatrixXd &v = eig.eigenvectors();
    return v * lambda.asDiagonal() * v.transpose();
}

ChannelSampler::ChannelSampler(const Geometry &geometry, const FadingParams &fading)
    : geometry_(geometry), fading_(fading)
{
    geometry_.validate();
    fading_.validate();
    const auto u = geometry_.element_positions();
    correlation_sqrt_ = matrix_sqrt_psd(spatial_correlation(u, geometry_.carrier_hz, geometry_.light_speed));
}

ChannelRealization ChannelSampler::sample(Rng &rng, Vec2 ue) const
{
    Geometry g = geometry_;
    g.ue = ue;
    g.validate();

    const int m_count = g.elements;
    const int taps = fading_.taps();

    ChannelRealization ch;
    const double d_bu = g.d_bu();
    const double d_cascade[] = {g.d_br(), g.d_ru()};
    ch.beta_bu = path_loss(fading_.gain_db, std::span<const double>(&d_bu, 1), fading_.pathloss_exponent);
    ch.beta_bru = path_loss(fading_.ris_gain_db, d_cascade, fading_.pathloss_exponent);

    // Draw order is part of the reproducibility contract: direct taps first, then the cascaded
    // NLoS vectors tap by tap. Direct taps are drawn even when the link is disabled.
    ch.direct.resize(taps);
    for (int k = 0; k < taps; ++k)
        ch.direct(k) = std::sqrt(ch.beta_bu) * rng.complex_normal(fading_.tap_variance(k));
    if (!fading_.direct_link)
        ch.direct.setZero();

    double los_weight = 1.0;
    double nlos_weight = 0.0;
    if (!std::isinf(fading_.kappa))
    {
        los_weight = std::sqrt(fading_.kappa / (fading_.kappa + 1.0));
        nlos_weight = std::sqrt(1.0 / (fading_.kappa + 1.0));
    }
    const CVector los = steering_vector(g.theta_bru(), m_count, g.element_spacing, g.carrier_hz, g.light_speed);

    ch.cascaded.resize(m_count, taps);
    CVector nlos(m_count);
    for (int k = 0; k < taps; ++k)
    {
        for (int m = 0; m < m_count; ++m)
            nlos(m) = rng.complex_normal(fading_.tap_variance(k));
        CVector mix = (k == 0) ? CVector(los_weight * los + nlos_weight * nlos) : nlos;
        const Eigen::VectorXd re = correlation_sqrt_ * mix.real();
        const Eigen::VectorXd im = correlation_sqrt_ * mix.imag();
        for (int m = 0; m < m_count; ++m)
            ch.cascaded(m, k) = std::sqrt(ch.beta_bru) * cdouble(re(m), im(m));
    }
    return ch;
}

ChannelRealization sample_channels(Rng &rng, const Geometry &geometry, const FadingParams &fading)
{
    return ChannelSampler(geometry, fading).sample(rng);
}

PulseResponse received_pulse(const ChannelRealization &channel, const CVector &gamma)
{
    if (gamma.size() != channel.cascaded.rows())
        throw DimensionError("received_pulse: gamma has " + std::to_string(gamma.size()) + " entries, channel has " +
                             std::to_string(channel.cascaded.rows()) + " elements");
    PulseResponse y;
    y.samples = channel.direct + channel.cascaded.transpose() * gamma;
    return y;
}

PulseResponse received_pulse(const ChannelRealization &channel, const CVector &gamma, double noise_power, Rng &rng)
{
    if (noise_power < 0.0)
        throw DomainError("received_pulse: noise power must be >= 0");
    PulseResponse y = received_pulse(channel, gamma);
    if (noise_power > 0.0)
        for (Eigen::Index k = 0; k < y.samples.size(); ++k)
            y.samples(k) += rng.complex_normal(noise_power);
    return y;
}

} // namespace riseq
