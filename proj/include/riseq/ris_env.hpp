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

#include "riseq/channel_model.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace riseq
{

// Signed main-tap power minus ISI power: sgn(Re y0) (Re y0)^2 - sum_{k>0} |y_k|^2.
double compute_eta(const CVector &y);

// eta divided by the pulse energy; always in [-1, 1]. Throws DomainError on an all-zero pulse.
double compute_eta_norm(const CVector &y);

// Interleaved [Re y0, Im y0, Re y1, ...] scaled by its largest absolute component.
Eigen::VectorXd state_from_pulse(const CVector &y);

// Pairs (a_2m, a_2m+1) -> unit-magnitude Gamma_m. A zero pair maps to 1.
CVector action_to_gamma(const Eigen::VectorXd &action);
Eigen::VectorXd gamma_to_action(const CVector &gamma);

// Scales every coefficient to unit magnitude; zeros map to 1.
CVector normalize_gamma(const CVector &gamma);

// 10 log10((Re y0)^2 / (sum_{k>0} |y_k|^2 + noise_power)).
double sinr_db(const CVector &y, double noise_power);

struct Constellation
{
    std::vector<cdouble> received;    // one sample per symbol instant after warm-up
    std::vector<cdouble> transmitted; // the symbol sent at that instant
};

// Unit-energy QPSK stream through the tap sequence y plus CN(0, noise_power). The first L
// outputs are dropped, so n_symbols - L samples are returned.
Constellation qpsk_constellation(const CVector &y, int n_symbols, double noise_power, Rng &rng);

struct WalkBounds
{
    Vec2 lower{-100.0, -100.0};
    Vec2 upper{-10.0, 100.0};
    double max_step = 20.0;

    bool contains(Vec2 p) const
    {
        return p.x >= lower.x && p.x <= upper.x && p.y >= lower.y && p.y <= upper.y;
    }

    friend bool operator==(const WalkBounds &, const WalkBounds &) = default;
};

// Uniform direction, uniform distance in [0, max_step]; candidates outside the bounds are redrawn.
Vec2 random_walk_step(Rng &rng, Vec2 position, const WalkBounds &bounds = {});

struct EpisodeConfig
{
    int n_steps = 2000;
    WalkBounds walk{};
    double reward_scale = 100.0;

    void validate() const;
};

struct StepResult
{
    Eigen::VectorXd state;
    double reward = 0.0; // eta_n of the new pulse, unscaled
    double eta = 0.0;
    PulseResponse pulse;
};

// One coherence block of the RIS link. Each observation draws fresh receiver noise unless the
// noise power is zero.
class RisEnvironment
{
public:
    RisEnvironment(ChannelRealization channel, double noise_power, Rng noise_rng);

    void reset(ChannelRealization channel);

    PulseResponse observe(const CVector &gamma);
    StepResult step(const CVector &gamma);

    const ChannelRealization &channel() const { return channel_; }
    double noise_power() const { return noise_power_; }
    int elements() const { return channel_.elements(); }
    int taps() const { return channel_.taps(); }
    int state_dim() const { return 2 * taps(); }
    int action_dim() const { return 2 * elements(); }

private:
    ChannelRealization channel_;
    double noise_power_;
    Rng noise_rng_;
};

} // namespace riseq
