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

#include "riseq/arise.hpp"

#include "riseq/ris_env.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace riseq
{

namespace
{

void check_dims(const CVector &gamma, const CMatrix &cascaded, const CVector &y)
{
    if (gamma.size() != cascaded.rows())
        throw DimensionError("arise: gamma length does not match the element count");
    if (y.size() != cascaded.cols())
        throw DimensionError("arise: pulse length does not match the tap count");
}

} // namespace

void AriseConfig::validate() const
{
    if (!(scale_factor > 0.0))
        throw std::invalid_argument("arise.scale_factor must be > 0");
    if (!(step_scale > 0.0))
        throw std::invalid_argument("arise.step_scale must be > 0");
    if (!(threshold > 0.0))
        throw std::invalid_argument("arise.threshold must be > 0");
    if (!(overshoot > 0.0))
        throw std::invalid_argument("arise.overshoot must be > 0");
    if (patience < 1)
        throw std::invalid_argument("arise.patience must be >= 1");
    if (max_iters < 1)
        throw std::invalid_argument("arise.max_iters must be >= 1");
}

double arise_cost(const CVector &y, double y_s)
{
    if (!(y_s > 0.0))
        throw DomainError("arise_cost: y_s must be positive");
    double j = 0.0;
    for (Eigen::Index k = 0; k < y.size(); ++k)
        j += std::norm((k == 0 ? 1.0 : 0.0) - y(k) / y_s);
    return j / static_cast<double>(y.size());
}

CVector arise_gradient_step(const CVector &gamma, const CMatrix &cascaded, const CVector &y, double y_s, double mu)
{
    check_dims(gamma, cascaded, y);
    if (!(y_s > 0.0))
        throw DomainError("arise_gradient_step: y_s must be positive");
    CVector error = -y / y_s;
    error(0) += 1.0;
    return gamma + (mu / static_cast<double>(y.size())) * (cascaded.conjugate() * error);
}

CVector arise_sgd_step(const CVector &gamma, const CMatrix &cascaded, const CVector &y, double y_s, double mu,
                       int k)
{
    check_dims(gamma, cascaded, y);
    if (!(y_s > 0.0))
        throw DomainError("arise_sgd_step: y_s must be positive");
    if (k < 0 || k >= y.size())
        throw std::out_of_range("arise_sgd_step: window index " + std::to_string(k) + " outside [0, L]");
    const cdouble error = (k == 0 ? 1.0 : 0.0) - y(k) / y_s;
    return gamma + mu * error * cascaded.col(k).conjugate();
}

AriseSolver::AriseSolver(const ChannelRealization &channel, const AriseConfig &config, CVector initial_gamma)
    : channel_(channel), config_(config), gamma_(normalize_gamma(initial_gamma))
{
    config_.validate();
    channel_.validate();
    pulse_ = received_pulse(channel_, gamma_).samples;

    const double main_tap = std::abs(pulse_(0));
    const double abs_sum = pulse_.cwiseAbs().sum();
    if (!(main_tap > 0.0) || !(abs_sum > 0.0))
        throw DomainError("arise: degenerate initial pulse");
    y_s_ = config_.scale_factor * channel_.elements() * main_tap;
    mu_ = config_.step_scale * static_cast<double>(pulse_.size()) / abs_sum;

    trace_.initial_eta = compute_eta(pulse_);
    trace_.initial_eta_norm = compute_eta_norm(pulse_);
}

void AriseSolver::register_transition(double eta_norm_before, double eta_norm_after)
{
    if (eta_norm_after < best_eta_norm_ - config_.overshoot)
    {
        mu_ /= 2.0;
        best_eta_norm_ = -1.0;
    }
    if (std::abs(eta_norm_after - eta_norm_before) < config_.threshold)
        ++stable_count_;
    else
        stable_count_ = 0;
}

bool AriseSolver::step()
{
    const double eta_norm = compute_eta_norm(pulse_);
    if (eta_norm > best_eta_norm_)
        best_eta_norm_ = eta_norm;

    gamma_ = normalize_gamma(arise_gradient_step(gamma_, channel_.cascaded, pulse_, y_s_, mu_));
    pulse_ = received_pulse(channel_, gamma_).samples;

    AriseIteration it;
    it.eta = compute_eta(pulse_);
    it.eta_norm = compute_eta_norm(pulse_);
    register_transition(eta_norm, it.eta_norm);
    it.step_size = mu_;
    if (config_.record_gamma)
        it.gamma = gamma_;
    trace_.iterations.push_back(std::move(it));

    if (done())
        trace_.converged = true;
    return done();
}

AriseResult arise_run(const ChannelRealization &channel, const AriseConfig &config, const CVector &initial_gamma)
{
    AriseSolver solver(channel, config, initial_gamma);
    while (!solver.step() && solver.trace().iterations_used() < config.max_iters)
    {
    }
    return {solver.gamma(), solver.trace()};
}

AriseResult arise_run(const ChannelRealization &channel, const AriseConfig &config)
{
    return arise_run(channel, config, arise_initial_gamma(channel, config.start));
}

CVector arise_initial_gamma(const ChannelRealization &channel, AriseStart start)
{
    if (start == AriseStart::ones)
        return CVector::Ones(channel.elements());
    return baseline_inverse(channel.cascaded);
}

std::string_view to_string(AriseStart start)
{
    return start == AriseStart::ones ? "ones" : "inverse";
}

AriseStart parse_arise_start(std::string_view name)
{
    if (name == "inverse")
        return AriseStart::inverse_phases;
    if (name == "ones")
        return AriseStart::ones;
    throw std::invalid_argument("unknown ARISE start '" + std::string(name) + "' (expected inverse or ones)");
}

CVector baseline_random(Rng &rng, int elements)
{
    if (elements < 1)
        throw std::invalid_argument("baseline_random: elements must be >= 1");
    CVector gamma(elements);
    for (int m = 0; m < elements; ++m)
        gamma(m) = std::polar(1.0, rng.uniform(-std::numbers::pi, std::numbers::pi));
    return gamma;
}

CVector baseline_inverse(const CMatrix &cascaded)
{
    CVector gamma(cascaded.rows());
    for (Eigen::Index m = 0; m < cascaded.rows(); ++m)
    {
        const cdouble h = cascaded(m, 0);
        gamma(m) = std::abs(h) > 0.0 ? std::polar(1.0, -std::arg(h)) : cdouble(1.0, 0.0);
    }
    return gamma;
}

} // namespace riseq
