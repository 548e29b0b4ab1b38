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

#include "riseq/agents.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace riseq
{

std::string_view to_string(AgentKind kind)
{
    switch (kind)
    {
    case AgentKind::ddpg:
        return "ddpg";
    case AgentKind::td3:
        return "td3";
    case AgentKind::sac:
        return "sac";
    }
    return "?";
}

AgentKind parse_agent_kind(std::string_view name)
{
    if (name == "ddpg")
        return AgentKind::ddpg;
    if (name == "td3")
        return AgentKind::td3;
    if (name == "sac")
        return AgentKind::sac;
    throw std::invalid_argument("unknown agent '" + std::string(name) + "' (expected ddpg, td3 or sac)");
}

AgentHyperparams AgentHyperparams::defaults(AgentKind kind)
{
    AgentHyperparams hp;
    if (kind == AgentKind::ddpg)
    {
        hp.layer_norm = true;
        hp.actor_lr = 1e-3;
    }
    return hp;
}

void AgentHyperparams::validate() const
{
    auto require = [](bool ok, const char *what) {
        if (!ok)
            throw std::invalid_argument(std::string("agent hyperparameters: ") + what);
    };
    require(!hidden.empty(), "hidden must list at least one layer");
    for (int h : hidden)
        require(h > 0, "hidden sizes must be positive");
    require(init_std > 0.0, "init_std must be positive");
    require(train_per_step >= 1, "train_per_step must be >= 1");
    require(batch_size >= 1, "batch_size must be >= 1");
    require(buffer_capacity >= 1, "buffer_capacity must be >= 1");
    require(td3_delay >= 1, "td3_delay must be >= 1");
    require(action_noise >= 0.0, "action_noise must be non-negative");
    require(noise_decay > 0.0 && noise_decay <= 1.0, "noise_decay must lie in (0, 1]");
    require(smoothing_variance >= 0.0, "smoothing_variance must be non-negative");
    require(smoothing_clip >= 0.0, "smoothing_clip must be non-negative");
    require(critic_lr > 0.0 && actor_lr > 0.0 && alpha_lr > 0.0, "learning rates must be positive");
    require(initial_alpha > 0.0, "initial_alpha must be positive");
    require(tau > 0.0 && tau <= 1.0, "tau must lie in (0, 1]");
    require(discount >= 0.0 && discount <= 1.0, "discount must lie in [0, 1]");
    require(reward_scale > 0.0, "reward_scale must be positive");
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity)
{
    if (capacity == 0)
        throw std::invalid_argument("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::push(Experience e)
{
    if (!items_.empty())
    {
        const Experience &first = items_.front();
        if (e.state.size() != first.state.size() || e.action.size() != first.action.size() ||
            e.next_state.size() != first.next_state.size())
            throw std::invalid_argument("ReplayBuffer::push: dimension mismatch");
    }
    if (e.state.size() != e.next_state.size())
        throw std::invalid_argument("ReplayBuffer::push: state and next_state differ in size");
    if (items_.size() == capacity_)
        items_.pop_front();
    items_.push_back(std::move(e));
}

Batch ReplayBuffer::sample(Rng &rng, int count) const
{
    if (count < 1)
        throw std::invalid_argument("ReplayBuffer::sample: count must be positive");
    if (items_.size() < static_cast<std::size_t>(count))
        throw InsufficientData("ReplayBuffer::sample: " + std::to_string(items_.size()) + " records, " +
                               std::to_string(count) + " requested");
    const Experience &first = items_.front();
    Batch b;
    b.states.resize(first.state.size(), count);
    b.actions.resize(first.action.size(), count);
    b.rewards.resize(count);
    b.next_states.resize(first.next_state.size(), count);
    for (int j = 0; j < count; ++j)
    {
        const Experience &e = items_[rng.index(items_.size())];
        b.states.col(j) = e.state;
        b.actions.col(j) = e.action;
        b.rewards(j) = e.reward;
        b.next_states.col(j) = e.next_state;
    }
    return b;
}

double exploration_noise_scale(int step, double sigma_a, double tau_d)
{
    if (step < 0)
        throw std::invalid_argument("exploration_noise_scale: negative step");
    return sigma_a * std::pow(tau_d, step);
}

ScheduleState ScheduleState::initial(const AgentHyperparams &hp)
{
    ScheduleState s;
    s.train_per_step = hp.train_per_step;
    s.actor_lr = hp.actor_lr;
    return s;
}

bool adaptive_schedule(ScheduleState &schedule, double reward)
{
    schedule.window.push_back(reward);
    if (schedule.window.size() > static_cast<std::size_t>(kScheduleWindow))
        schedule.window.pop_front();
    if (schedule.window.size() < static_cast<std::size_t>(kScheduleWindow))
        return false;

    double sum = 0.0;
    for (double r : schedule.window)
        sum += r;
    if (sum / kScheduleWindow <= schedule.reward_target)
        return false;

    schedule.actor_lr *= kScheduleLrDecay;
    schedule.train_per_step = std::max(schedule.train_per_step - 1, 1);
    schedule.reward_target += kScheduleTargetStep;
    ++schedule.triggers;
    return true;
}

Eigen::MatrixXd critic_input(const Eigen::MatrixXd &states, const Eigen::MatrixXd &actions)
{
    if (states.cols() != actions.cols())
        throw std::invalid_argument("critic_input: batch size mismatch");
    Eigen::MatrixXd x(states.rows() + actions.rows(), states.cols());
    x.topRows(states.rows()) = states;
    x.bottomRows(actions.rows()) = actions;
    return x;
}

double SacNets::alpha() const
{
    return std::exp(log_alpha);
}

namespace
{

std::vector<int> layer_sizes(int in, const std::vector<int> &hidden, int out)
{
    std::vector<int> sizes{in};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(out);
    return sizes;
}

Mlp make_actor(int state_dim, int out_dim, OutputActivation act, const AgentHyperparams &hp, Rng &rng)
{
    return Mlp({layer_sizes(state_dim, hp.hidden, out_dim), hp.layer_norm, act}, rng, hp.init_std);
}

Mlp make_critic(int state_dim, int action_dim, const AgentHyperparams &hp, Rng &rng)
{
    return Mlp({layer_sizes(state_dim + action_dim, hp.hidden, 1), hp.layer_norm, OutputActivation::linear}, rng,
               hp.init_std);
}

CriticPair make_critics(int state_dim, int action_dim, const AgentHyperparams &hp, Rng &rng)
{
    CriticPair c;
    for (int i = 0; i < 2; ++i)
    {
        c.online[i] = make_critic(state_dim, action_dim, hp, rng);
        c.target[i] = c.online[i];
        c.opt[i] = Adam(c.online[i].size(), {.learning_rate = hp.critic_lr});
    }
    return c;
}

// Squared-error regression of `critic` onto `targets`; returns the loss before the step.
double regress(Mlp &critic, Adam &opt, const Eigen::MatrixXd &input, const Eigen::RowVectorXd &targets)
{
    Mlp::Cache cache;
    const Eigen::RowVectorXd q = critic.forward(input, &cache);
    const Eigen::RowVectorXd err = q - targets;
    const double n = static_cast<double>(targets.size());
    const Mlp::Gradients g = critic.backward(cache, (2.0 / n) * err);
    opt.step(critic, g.params);
    return err.squaredNorm() / n;
}

// Ascends mean Q(s, mu(s)) for a deterministic actor; returns -mean Q before the step.
double deterministic_actor_step(Mlp &actor, Adam &opt, const Mlp &critic, const Eigen::MatrixXd &states)
{
    Mlp::Cache actor_cache;
    const Eigen::MatrixXd actions = actor.forward(states, &actor_cache);
    Mlp::Cache critic_cache;
    const Eigen::RowVectorXd q = critic.forward(critic_input(states, actions), &critic_cache);
    const double n = static_cast<double>(states.cols());
    const Eigen::MatrixXd grad_q = Eigen::RowVectorXd::Constant(states.cols(), -1.0 / n);
    const Mlp::Gradients cg = critic.backward(critic_cache, grad_q);
    const Mlp::Gradients ag = actor.backward(actor_cache, cg.input.bottomRows(actions.rows()));
    opt.step(actor, ag.params);
    return -q.mean();
}

Eigen::RowVectorXd twin_min(const CriticPair &c, const Eigen::MatrixXd &input, bool target)
{
    const auto &nets = target ? c.target : c.online;
    return nets[0].forward(input).cwiseMin(nets[1].forward(input));
}

} // namespace

DdpgNets make_ddpg_nets(int state_dim, int action_dim, const AgentHyperparams &hp, Rng &rng)
{
    DdpgNets n;
    n.actor = make_actor(state_dim, action_dim, OutputActivation::tanh, hp, rng);
    n.critic = make_critic(state_dim, action_dim, hp, rng);
    n.actor_target = n.actor;
    n.critic_target = n.critic;
    n.actor_opt = Adam(n.actor.size(), {.learning_rate = hp.actor_lr});
    n.critic_opt = Adam(n.critic.size(), {.learning_rate = hp.critic_lr});
    return n;
}

Td3Nets make_td3_nets(int state_dim, int action_dim, const AgentHyperparams &hp, Rng &rng)
{
    Td3Nets n;
    n.actor = make_actor(state_dim, action_dim, OutputActivation::tanh, hp, rng);
    n.actor_target = n.actor;
    n.actor_opt = Adam(n.actor.size(), {.learning_rate = hp.actor_lr});
    n.critics = make_critics(state_dim, action_dim, hp, rng);
    return n;
}

SacNets make_sac_nets(int state_dim, int action_dim, const AgentHyperparams &hp, Rng &rng)
{
    SacNets n;
    n.actor = make_actor(state_dim, 2 * action_dim, OutputActivation::linear, hp, rng);
    n.actor_opt = Adam(n.actor.size(), {.learning_rate = hp.actor_lr});
    n.critics = make_critics(state_dim, action_dim, hp, rng);
    n.log_alpha = std::log(hp.initial_alpha);
    return n;
}

Eigen::RowVectorXd ddpg_targets(const DdpgNets &nets, const Batch &batch, const AgentHyperparams &hp)
{
    const Eigen::MatrixXd next_actions = nets.actor_target.forward(batch.next_states);
    const Eigen::RowVectorXd q_next = nets.critic_target.forward(critic_input(batch.next_states, next_actions));
    return batch.rewards + hp.discount * q_next;
}

UpdateStats ddpg_update(DdpgNets &nets, const Batch &batch, const AgentHyperparams &hp)
{
    UpdateStats stats;
    stats.targets = ddpg_targets(nets, batch, hp);
    stats.critic_loss =
        regress(nets.critic, nets.critic_opt, critic_input(batch.states, batch.actions), stats.targets);
    stats.actor_loss = deterministic_actor_step(nets.actor, nets.actor_opt, nets.critic, batch.states);
    stats.actor_updated = true;
    polyak_update(nets.actor_target, nets.actor, hp.tau);
    polyak_update(nets.critic_target, nets.critic, hp.tau);
    return stats;
}

Eigen::MatrixXd td3_smoothing_noise(Rng &rng, Eigen::Index rows, Eigen::Index cols, const AgentHyperparams &hp)
{
    const double sd = std::sqrt(hp.smoothing_variance);
    Eigen::MatrixXd noise(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            noise(i, j) = std::clamp(rng.normal(0.0, sd), -hp.smoothing_clip, hp.smoothing_clip);
    return noise;
}

Eigen::RowVectorXd td3_targets(const Td3Nets &nets, const Batch &batch, const AgentHyperparams &hp,
                               const Eigen::MatrixXd &smoothing_noise)
{
    const Eigen::MatrixXd next_actions =
        (nets.actor_target.forward(batch.next_states) + smoothing_noise).cwiseMax(-1.0).cwiseMin(1.0);
    return batch.rewards + hp.discount * twin_min(nets.critics, critic_input(batch.next_states, next_actions), true);
}

UpdateStats td3_update(Td3Nets &nets, const Batch &batch, const AgentHyperparams &hp, long train_iter, Rng &rng)
{
    UpdateStats stats;
    const Eigen::MatrixXd noise = td3_smoothing_noise(rng, batch.actions.rows(), batch.size(), hp);
    stats.targets = td3_targets(nets, batch, hp, noise);
    const Eigen::MatrixXd input = critic_input(batch.states, batch.actions);
    stats.critic_loss = regress(nets.critics.online[0], nets.critics.opt[0], input, stats.targets);
    stats.critic2_loss = regress(nets.critics.online[1], nets.critics.opt[1], input, stats.targets);

    if (train_iter % hp.td3_delay == 0)
    {
        stats.actor_loss =
            deterministic_actor_step(nets.actor, nets.actor_opt, nets.critics.online[0], batch.states);
        stats.actor_updated = true;
        polyak_update(nets.actor_target, nets.actor, hp.tau);
        for (int i = 0; i < 2; ++i)
            polyak_update(nets.critics.target[i], nets.critics.online[i], hp.tau);
    }
    return stats;
}

double sac_temperature_gradient(const Eigen::RowVectorXd &log_prob, double target_entropy)
{
    return -(log_prob.array() + target_entropy).mean();
}

Eigen::RowVectorXd sac_targets(const SacNets &nets, const Batch &batch, const AgentHyperparams &hp,
                               const Eigen::MatrixXd &policy_noise)
{
    const PolicySample next = gaussian_policy_evaluate(split_policy_head(nets.actor.forward(batch.next_states)),
                                                       policy_noise);
    const Eigen::RowVectorXd q_next = twin_min(nets.critics, critic_input(batch.next_states, next.action), true);
    return batch.rewards + hp.discount * (q_next - nets.alpha() * next.log_prob);
}

UpdateStats sac_update(SacNets &nets, const Batch &batch, const AgentHyperparams &hp, Rng &rng)
{
    const Eigen::Index action_dim = batch.actions.rows();
    const Eigen::Index n = batch.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    auto draw_noise = [&] {
        Eigen::MatrixXd xi(action_dim, n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < action_dim; ++i)
                xi(i, j) = rng.normal();
        return xi;
    };

    UpdateStats stats;
    stats.targets = sac_targets(nets, batch, hp, draw_noise());
    const Eigen::MatrixXd input = critic_input(batch.states, batch.actions);
    stats.critic_loss = regress(nets.critics.online[0], nets.critics.opt[0], input, stats.targets);
    stats.critic2_loss = regress(nets.critics.online[1], nets.critics.opt[1], input, stats.targets);

    // Actor: minimize mean(alpha log pi(a|s) - min_i Q_i(s, a)) with a reparameterized.
    const double alpha = nets.alpha();
    Mlp::Cache actor_cache;
    const PolicyHead head = split_policy_head(nets.actor.forward(batch.states, &actor_cache));
    const PolicySample sample = gaussian_policy_evaluate(head, draw_noise());
    const Eigen::MatrixXd q_input = critic_input(batch.states, sample.action);
    std::array<Mlp::Cache, 2> caches;
    std::array<Eigen::RowVectorXd, 2> q;
    for (int i = 0; i < 2; ++i)
        q[i] = nets.critics.online[i].forward(q_input, &caches[i]);

    Eigen::MatrixXd grad_action = Eigen::MatrixXd::Zero(action_dim, n);
    for (int i = 0; i < 2; ++i)
    {
        Eigen::RowVectorXd grad_q = Eigen::RowVectorXd::Zero(n);
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const bool chosen = i == 0 ? q[0](j) <= q[1](j) : q[1](j) < q[0](j);
            if (chosen)
                grad_q(j) = -inv_n;
        }
        if (grad_q.isZero(0.0))
            continue;
        grad_action += nets.critics.online[i].backward(caches[i], grad_q).input.bottomRows(action_dim);
    }
    const Eigen::RowVectorXd q_min = q[0].cwiseMin(q[1]);
    stats.actor_loss = (alpha * sample.log_prob - q_min).mean();
    const Eigen::MatrixXd grad_raw = gaussian_policy_backward(
        head, sample, grad_action, Eigen::RowVectorXd::Constant(n, alpha * inv_n));
    nets.actor_opt.step(nets.actor, nets.actor.backward(actor_cache, grad_raw).params);
    stats.actor_updated = true;

    const double target_entropy = sac_target_entropy(static_cast<int>(action_dim));
    stats.alpha_loss = -(nets.log_alpha * (sample.log_prob.array() + target_entropy)).mean();
    nets.log_alpha -= hp.alpha_lr * sac_temperature_gradient(sample.log_prob, target_entropy);

    for (int i = 0; i < 2; ++i)
        polyak_update(nets.critics.target[i], nets.critics.online[i], hp.tau);
    return stats;
}

Agent::Agent(AgentKind kind, int state_dim, int action_dim, AgentHyperparams hp)
    : kind_(kind), state_dim_(state_dim), action_dim_(action_dim), hp_(std::move(hp)),
      buffer_(hp_.buffer_capacity), schedule_(ScheduleState::initial(hp_))
{
    hp_.validate();
    if (state_dim < 1 || action_dim < 1)
        throw std::invalid_argument("Agent: dimensions must be positive");
}

void Agent::begin_episode(Rng &)
{
    buffer_.clear();
    schedule_ = ScheduleState::initial(hp_);
    set_actor_learning_rate(hp_.actor_lr);
}

namespace
{

constexpr const char *kAgentMagic = "riseq-agent";
constexpr int kAgentFormat = 1;

Eigen::VectorXd clip_unit(Eigen::VectorXd a)
{
    return a.cwiseMax(-1.0).cwiseMin(1.0);
}

Eigen::VectorXd noisy_action(const Mlp &actor, const Eigen::VectorXd &state, int step, const AgentHyperparams &hp,
                             Rng &rng)
{
    Eigen::VectorXd a = actor.forward_one(state);
    const double sd = exploration_noise_scale(step, hp.action_noise, hp.noise_decay);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a(i) += rng.normal(0.0, sd);
    return clip_unit(std::move(a));
}

} // namespace

void Agent::save(std::ostream &out) const
{
    out << kAgentMagic << ' ' << kAgentFormat << '\n'
        << to_string(kind_) << ' ' << state_dim_ << ' ' << action_dim_ << '\n'
        << std::setprecision(17);
    out << "hidden " << hp_.hidden.size();
    for (int h : hp_.hidden)
        out << ' ' << h;
    out << '\n'
        << "layer_norm " << hp_.layer_norm << '\n'
        << "train_iterations " << train_iterations_ << '\n'
        << "schedule " << schedule_.reward_target << ' ' << schedule_.train_per_step << ' ' << schedule_.actor_lr
        << ' ' << schedule_.triggers << '\n';
    out << "log_alpha " << log_temperature() << '\n';

    auto nets = const_cast<Agent *>(this)->networks();
    out << "networks " << nets.size() << '\n';
    for (const auto &[name, net] : nets)
    {
        out << name << '\n';
        net->save(out);
    }
    if (!out)
        throw std::runtime_error("Agent::save: write failed");
}

void Agent::load(std::istream &in)
{
    auto fail = [](const std::string &what) { throw std::runtime_error("Agent::load: " + what); };
    auto expect = [&](const char *key) {
        std::string k;
        if (!(in >> k) || k != key)
            fail(std::string("expected '") + key + "'");
    };

    std::string magic;
    int format = 0;
    if (!(in >> magic >> format) || magic != kAgentMagic || format != kAgentFormat)
        fail("not an agent checkpoint");
    std::string kind;
    int sd = 0;
    int ad = 0;
    in >> kind >> sd >> ad;
    if (!in || parse_agent_kind(kind) != kind_ || sd != state_dim_ || ad != action_dim_)
        fail("checkpoint is for a different agent or environment");

    expect("hidden");
    std::size_t n_hidden = 0;
    in >> n_hidden;
    std::vector<int> hidden(n_hidden);
    for (int &h : hidden)
        in >> h;
    expect("layer_norm");
    bool layer_norm = false;
    in >> layer_norm;
    if (!in || hidden != hp_.hidden || layer_norm != hp_.layer_norm)
        fail("network architecture mismatch");

    expect("train_iterations");
    in >> train_iterations_;
    expect("schedule");
    in >> schedule_.reward_target >> schedule_.train_per_step >> schedule_.actor_lr >> schedule_.triggers;
    schedule_.window.clear();
    expect("log_alpha");
    double log_alpha = 0.0;
    in >> log_alpha;
    set_log_temperature(log_alpha);

    expect("networks");
    std::size_t count = 0;
    in >> count;
    auto nets = networks();
    if (!in || count != nets.size())
        fail("network count mismatch");
    for (auto &[name, net] : nets)
    {
        std::string got;
        in >> got;
        if (got != name)
            fail("expected network '" + name + "', found '" + got + "'");
        Mlp loaded = Mlp::load(in);
        if (!(loaded.spec() == net->spec()))
            fail("shape mismatch for network '" + name + "'");
        *net = std::move(loaded);
    }
    set_actor_learning_rate(schedule_.actor_lr);
}

DdpgAgent::DdpgAgent(int state_dim, int action_dim, AgentHyperparams hp, Rng &init_rng)
    : Agent(AgentKind::ddpg, state_dim, action_dim, std::move(hp)),
      nets_(make_ddpg_nets(state_dim, action_dim, hp_, init_rng))
{
}

Eigen::VectorXd DdpgAgent::act(const Eigen::VectorXd &state, int step, Rng &rng)
{
    return noisy_action(nets_.actor_target, state, step, hp_, rng);
}

Eigen::VectorXd DdpgAgent::policy(const Eigen::VectorXd &state) const
{
    return nets_.actor.forward_one(state);
}

UpdateStats DdpgAgent::train(const Batch &batch, Rng &)
{
    ++train_iterations_;
    return ddpg_update(nets_, batch, hp_);
}

void DdpgAgent::begin_episode(Rng &init_rng)
{
    nets_ = make_ddpg_nets(state_dim_, action_dim_, hp_, init_rng);
    Agent::begin_episode(init_rng);
}

void DdpgAgent::set_actor_learning_rate(double lr)
{
    nets_.actor_opt.set_learning_rate(lr);
}

std::vector<std::pair<std::string, Mlp *>> DdpgAgent::networks()
{
    return {{"actor", &nets_.actor},
            {"actor_target", &nets_.actor_target},
            {"critic", &nets_.critic},
            {"critic_target", &nets_.critic_target}};
}

Td3Agent::Td3Agent(int state_dim, int action_dim, AgentHyperparams hp, Rng &init_rng)
    : Agent(AgentKind::td3, state_dim, action_dim, std::move(hp)),
      nets_(make_td3_nets(state_dim, action_dim, hp_, init_rng))
{
}

Eigen::VectorXd Td3Agent::act(const Eigen::VectorXd &state, int step, Rng &rng)
{
    return noisy_action(nets_.actor_target, state, step, hp_, rng);
}

Eigen::VectorXd Td3Agent::policy(const Eigen::VectorXd &state) const
{
    return nets_.actor.forward_one(state);
}

UpdateStats Td3Agent::train(const Batch &batch, Rng &rng)
{
    ++train_iterations_;
    return td3_update(nets_, batch, hp_, train_iterations_, rng);
}

void Td3Agent::set_actor_learning_rate(double lr)
{
    nets_.actor_opt.set_learning_rate(lr);
}

std::vector<std::pair<std::string, Mlp *>> Td3Agent::networks()
{
    return {{"actor", &nets_.actor},
            {"actor_target", &nets_.actor_target},
            {"critic1", &nets_.critics.online[0]},
            {"critic2", &nets_.critics.online[1]},
            {"critic1_target", &nets_.critics.target[0]},
            {"critic2_target", &nets_.critics.target[1]}};
}

SacAgent::SacAgent(int state_dim, int action_dim, AgentHyperparams hp, Rng &init_rng)
    : Agent(AgentKind::sac, state_dim, action_dim, std::move(hp)),
      nets_(make_sac_nets(state_dim, action_dim, hp_, init_rng))
{
}

Eigen::VectorXd SacAgent::act(const Eigen::VectorXd &state, int, Rng &rng)
{
    const PolicySample s = gaussian_policy_sample(split_policy_head(nets_.actor.forward(state)), rng);
    return s.action.col(0);
}

Eigen::VectorXd SacAgent::policy(const Eigen::VectorXd &state) const
{
    const PolicyHead head = split_policy_head(nets_.actor.forward(state));
    return head.mean.col(0).array().tanh();
}

UpdateStats SacAgent::train(const Batch &batch, Rng &rng)
{
    ++train_iterations_;
    return sac_update(nets_, batch, hp_, rng);
}

void SacAgent::begin_episode(Rng &init_rng)
{
    Agent::begin_episode(init_rng);
    restore_extra_state();
}

void SacAgent::restore_extra_state()
{
    nets_.log_alpha = std::log(hp_.initial_alpha);
}

void SacAgent::set_actor_learning_rate(double lr)
{
    nets_.actor_opt.set_learning_rate(lr);
}

std::vector<std::pair<std::string, Mlp *>> SacAgent::networks()
{
    return {{"actor", &nets_.actor},
            {"critic1", &nets_.critics.online[0]},
            {"critic2", &nets_.critics.online[1]},
            {"critic1_target", &nets_.critics.target[0]},
            {"critic2_target", &nets_.critics.target[1]}};
}

std::unique_ptr<Agent> make_agent(AgentKind kind, int state_dim, int action_dim, const AgentHyperparams &hp,
                                  Rng &init_rng)
{
    switch (kind)
    {
    case AgentKind::ddpg:
        return std::make_unique<DdpgAgent>(state_dim, action_dim, hp, init_rng);
    case AgentKind::td3:
        return std::make_unique<Td3Agent>(state_dim, action_dim, hp, init_rng);
    case AgentKind::sac:
        return std::make_unique<SacAgent>(state_dim, action_dim, hp, init_rng);
    }
    throw std::invalid_argument("make_agent: unknown kind");
}

EpisodeTrace run_episode(Agent &agent, RisEnvironment &env, const EpisodeConfig &config, Rng &policy_rng,
                         Rng &init_rng, EpisodeOptions options)
{
    config.validate();
    if (agent.state_dim() != env.state_dim() || agent.action_dim() != env.action_dim())
        throw DimensionError("run_episode: agent and environment dimensions differ");
    if (options.reset_agent)
        agent.begin_episode(init_rng);

    const AgentHyperparams &hp = agent.hyperparams();
    EpisodeTrace trace;
    trace.steps.reserve(static_cast<std::size_t>(config.n_steps));

    Eigen::VectorXd state = state_from_pulse(env.observe(CVector::Ones(env.elements())).samples);
    for (int t = 0; t < config.n_steps; ++t)
    {
        Eigen::VectorXd action = agent.act(state, t, policy_rng);
        const CVector gamma = action_to_gamma(action);
        StepResult r = env.step(gamma);
        agent.buffer().push({state, std::move(action), config.reward_scale * r.reward, r.state});

        if (options.train && agent.buffer().size() >= static_cast<std::size_t>(hp.batch_size))
        {
            const int n_train = agent.schedule().train_per_step;
            for (int i = 0; i < n_train; ++i)
                agent.train(agent.buffer().sample(policy_rng, hp.batch_size), policy_rng);
        }
        if (options.train)
        {
            const double lr_before = agent.schedule().actor_lr;
            adaptive_schedule(agent.schedule(), r.reward);
            if (agent.schedule().actor_lr != lr_before)
                agent.apply_schedule();
        }

        const CVector clean = received_pulse(env.channel(), gamma).samples;
        trace.steps.push_back({t, r.eta, r.reward, sinr_db(clean, env.noise_power())});
        state = std::move(r.state);
    }
    return trace;
}

} // namespace riseq
