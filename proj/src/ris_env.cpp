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

#include "riseq/ris_env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace riseq
{

namespace
{

double sign(double x)
{
    return (x > 0.0) - (x < 0.0);
}

} // namespace

double compute_eta(const CVector &y)
{
    if (y.size() == 0)
        throw DomainError("compute_eta: empty pulse");
    const double re0 = y(0).real();
    double isi = 0.0;
    for (Eigen::Index k = 1; k < y.size(); ++k)
        isi += std::norm(y(k));
    return sign(re0) * re0 * re0 - isi;
}

double compute_eta_norm(const CVector &y)
{
    const double energy = y.squaredNorm();
    if (!(energy > 0.0))
        throw DomainError("compute_eta_norm: all-zero pulse");
    return compute_eta(y) / energy;
}

Eigen::VectorXd state_from_pulse(const CVector &y)
{
    Eigen::VectorXd s(2 * y.size());
    for (Eigen::Index k = 0; k < y.size(); ++k)
    {
        s(2 * k) = y(k).real();
        s(2 * k + 1) = y(k).imag();
    }
    const double peak = s.size() > 0 ? s.cwiseAbs().maxCoeff() : 0.0;
    if (!(peak > 0.0))
        throw DomainError("state_from_pulse: all-zero pulse");
    return s / peak;
}

CVector action_to_gamma(const Eigen::VectorXd &action)
{
    if (action.size() % 2 != 0)
        throw DimensionError("action_to_gamma: action length must be even");
    CVector gamma(action.size() / 2);
    for (Eigen::Index m = 0; m < gamma.size(); ++m)
        gamma(m) = cdouble(action(2 * m), action(2 * m + 1));
    return normalize_gamma(gamma);
}

Eigen::VectorXd gamma_to_action(const CVector &gamma)
{
    Eigen::VectorXd a(2 * gamma.size());
    for (Eigen::Index m = 0; m < gamma.size(); ++m)
    {
        a(2 * m) = gamma(m).real();
        a(2 * m + 1) = gamma(m).imag();
    }
    return a;
}

CVector normalize_gamma(const CVector &gamma)
{
    CVector out(gamma.size());
    for (Eigen::Index m = 0; m < gamma.size(); ++m)
    {
        const double mag = std::abs(gamma(m));
        out(m) = mag > 0.0 ? gamma(m) / mag : cdouble(1.0, 0.0);
    }
    return out;
}

double sinr_db(const CVector &y, double noise_power)
{
    if (y.size() == 0)
        throw DomainError("sinr_db: empty pulse");
    const double interference = y.tail(y.size() - 1).squaredNorm() + noise_power;
    if (!(interference > 0.0))
        throw DomainError("sinr_db: interference plus noise must be positive");
    const double re0 = y(0).real();
    return 10.0 * std::log10(re0 * re0 / interference);
}

Constellation qpsk_constellation(const CVector &y, int n_symbols, double noise_power, Rng &rng)
{
    const int taps = static_cast<int>(y.size());
    if (taps == 0)
        throw DomainError("qpsk_constellation: empty pulse");
    if (n_symbols < taps)
        throw std::invalid_argument("qpsk_constellation: n_symbols must be >= L+1");
    if (noise_power < 0.0)
        throw DomainError("qpsk_constellation: noise power must be >= 0");

    const double amp = 1.0 / std::numbers::sqrt2;
    std::vector<cdouble> symbols(static_cast<std::size_t>(n_symbols));
    for (auto &s : symbols)
    {
        const std::uint64_t bits = rng.index(4);
        s = cdouble((bits & 1U) ? -amp : amp, (bits & 2U) ? -amp : amp);
    }

    Constellation out;
    const int warmup = taps - 1;
    out.received.reserve(static_cast<std::size_t>(n_symbols - warmup));
    out.transmitted.reserve(static_cast<std::size_t>(n_symbols - warmup));
    for (int n = warmup; n < n_symbols; ++n)
    {
        cdouble r = 0.0;
        for (int k = 0; k < taps; ++k)
            r += y(k) * symbols[static_cast<std::size_t>(n - k)];
        if (noise_power > 0.0)
            r += rng.complex_normal(noise_power);
        out.received.push_back(r);
        out.transmitted.push_back(symbols[static_cast<std::size_t>(n)]);
    }
    return out;
}

Vec2 random_walk_step(Rng &rng, Vec2 position, const WalkBounds &bounds)
{
    if (!bounds.contains(position))
        throw DomainError("random_walk_step: start position outside the walk bounds");
    for (;;)
    {
        const double angle = rng.uniform(-std::numbers::pi, std::numbers::pi);
        const double dist = rng.uniform(0.0, bounds.max_step);
        const Vec2 next{position.x + dist * std::cos(angle), position.y + dist * std::sin(angle)};
        if (bounds.contains(next))
            return next;
    }
}

void EpisodeConfig::validate() const
{
    if (n_steps < 1)
        throw std::invalid_argument("episode.n_steps must be >= 1");
    if (!(walk.max_step >= 0.0))
        throw std::invalid_argument("episode.walk.max_step must be >= 0");
    if (!(walk.lower.x < walk.upper.x) || !(walk.lower.y < walk.upper.y))
        throw std::invalid_argument("episode.walk bounds are empty");
    if (!(reward_scale > 0.0))
        throw std::invalid_argument("episode.reward_scale must be > 0");
}

RisEnvironment::RisEnvironment(ChannelRealization channel, double noise_power, Rng noise_rng)
    : channel_(std::move(channel)), noise_power_(noise_power), noise_rng_(std::move(noise_rng))
{
    if (noise_power_ < 0.0)
        throw DomainError("RisEnvironment: noise power must be >= 0");
    channel_.validate();
}

void RisEnvironment::reset(ChannelRealization channel)
{
    channel.validate();
    channel_ = std::move(channel);
}

PulseResponse RisEnvironment::observe(const CVector &gamma)
{
    return received_pulse(channel_, gamma, noise_power_, noise_rng_);
}

StepResult RisEnvironment::step(const CVector &gamma)
{
    StepResult r;
    r.pulse = observe(gamma);
    r.state = state_from_pulse(r.pulse.samples);
    r.eta = compute_eta(r.pulse.samples);
    r.reward = compute_eta_norm(r.pulse.samples);
    return r;
}

} // namespace riseq
