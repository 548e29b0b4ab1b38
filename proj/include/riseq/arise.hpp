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

#include <optional>
#include <string_view>
#include <vector>

namespace riseq
{

// Surface configuration ARISE starts from.
enum class AriseStart
{
    inverse_phases, // conjugate phases of the tap-0 cascaded channel
    ones,           // unconfigured surface
};

std::string_view to_string(AriseStart start);
AriseStart parse_arise_start(std::string_view name);

struct AriseConfig
{
    double scale_factor = 0.10;   // alpha_s in y_s = alpha_s * M * |y_0|
    double step_scale = 10.0;     // alpha_mu in mu = alpha_mu (L+1) / sum_k |y_k|
    double threshold = 1e-5;      // |eta_n' - eta_n| below this counts towards convergence
    double overshoot = 0.5;       // eta_n' below best - overshoot halves the step size
    int patience = 10;            // consecutive sub-threshold iterations before stopping
    int max_iters = 5000;
    AriseStart start = AriseStart::inverse_phases;
    bool record_gamma = false;

    void validate() const;

    friend bool operator==(const AriseConfig &, const AriseConfig &) = default;
};

struct AriseIteration
{
    double eta = 0.0;
    double eta_norm = 0.0;
    double step_size = 0.0;
    std::optional<CVector> gamma;
};

struct AriseTrace
{
    double initial_eta = 0.0;
    double initial_eta_norm = 0.0;
    std::vector<AriseIteration> iterations;
    bool converged = false;

    int iterations_used() const { return static_cast<int>(iterations.size()); }
};

struct AriseResult
{
    CVector gamma;
    AriseTrace trace;
};

// Mean squared error between the unit pulse and y / y_s over the L+1 taps.
double arise_cost(const CVector &y, double y_s);

// Steepest-descent update with the expectation taken as the mean over the L+1 windows:
//   Gamma' = Gamma + mu / (L+1) * sum_k conj(h_BRU[:, k]) (s_k - y_k / y_s).
// Not normalized; the caller projects back onto |Gamma_m| = 1.
CVector arise_gradient_step(const CVector &gamma, const CMatrix &cascaded, const CVector &y, double y_s,
                            double mu);

// Single-window variant: Gamma' = Gamma + mu conj(h_BRU[:, k]) (s_k - y_k / y_s).
CVector arise_sgd_step(const CVector &gamma, const CMatrix &cascaded, const CVector &y, double y_s, double mu,
                       int k);

// Iterative ARISE equalizer over a known channel. Pulses during the optimization are computed
// noiselessly from the channel; y_s and mu are fixed from the initial pulse.
class AriseSolver
{
public:
    AriseSolver(const ChannelRealization &channel, const AriseConfig &config, CVector initial_gamma);

    // Runs one iteration. Returns true once the stop condition holds.
    bool step();

    // Step-size control and convergence bookkeeping for one transition eta_n -> eta_n'.
    void register_transition(double eta_norm_before, double eta_norm_after);

    const CVector &gamma() const { return gamma_; }
    const CVector &pulse() const { return pulse_; }
    double step_size() const { return mu_; }
    double scale() const { return y_s_; }
    double best_eta_norm() const { return best_eta_norm_; }
    int stable_count() const { return stable_count_; }
    bool done() const { return stable_count_ >= config_.patience; }
    const AriseTrace &trace() const { return trace_; }

private:
    const ChannelRealization &channel_;
    AriseConfig config_;
    CVector gamma_;
    CVector pulse_;
    double y_s_ = 0.0;
    double mu_ = 0.0;
    double best_eta_norm_ = -1.0;
    int stable_count_ = 0;
    AriseTrace trace_;
};

AriseResult arise_run(const ChannelRealization &channel, const AriseConfig &config, const CVector &initial_gamma);

// Starts from arise_initial_gamma(channel, config.start).
AriseResult arise_run(const ChannelRealization &channel, const AriseConfig &config);

CVector arise_initial_gamma(const ChannelRealization &channel, AriseStart start);

// Phases i.i.d. uniform in [-pi, pi).
CVector baseline_random(Rng &rng, int elements);

// Gamma_m = exp(-j arg h_BRU[m][0]); a zero tap maps to 1.
CVector baseline_inverse(const CMatrix &cascaded);

} // namespace riseq
