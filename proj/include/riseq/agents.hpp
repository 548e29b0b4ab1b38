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

#include "riseq/neural.hpp"
#include "riseq/ris_env.hpp"

#include <Eigen/Dense>

#include <array>
#include <deque>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace riseq
{

enum class AgentKind
{
    ddpg,
    td3,
    sac,
};

std::string_view to_string(AgentKind kind);
AgentKind parse_agent_kind(std::string_view name);

struct AgentHyperparams
{
    std::vector<int> hidden{512, 512};
    bool layer_norm = false;
    double init_std = 0.1;

    int train_per_step = 4;        // N_train at episode start
    int batch_size = 4;
    std::size_t buffer_capacity = 400;
    int td3_delay = 2;

    double action_noise = 0.3;     // sigma_a
    double noise_decay = 0.999;    // tau_d
    double smoothing_variance = 0.3;
    double smoothing_clip = 0.5;

    double critic_lr = 1e-3;
    double actor_lr = 2e-3;
    double alpha_lr = 1e-3;
    double initial_alpha = 1.0;
    double tau = 0.001;
    double discount = 0.99;
    double reward_scale = 100.0;

    // Table defaults per algorithm: DDPG gets layer norm and actor_lr 1e-3.
    static AgentHyperparams defaults(AgentKind kind);
    void validate() const;

    friend bool operator==(const AgentHyperparams &, const AgentHyperparams &) = default;
};

struct Experience
{
    Eigen::VectorXd state;
    Eigen::VectorXd action;
    double reward = 0.0; // already multiplied by the reward scale
    Eigen::VectorXd next_state;
};

struct Batch
{
    Eigen::MatrixXd states;
    Eigen::MatrixXd actions;
    Eigen::RowVectorXd rewards;
    Eigen::MatrixXd next_states;

    int size() const { return static_cast<int>(rewards.size()); }
};

class InsufficientData : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Bounded FIFO of transitions; pushing into a full buffer evicts the oldest entry.
class ReplayBuffer
{
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Experience e);
    // Uniform with replacement. Throws InsufficientData when fewer than `count` records are held.
    Batch sample(Rng &rng, int count) const;
    void clear() { items_.clear(); }

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Experience &at(std::size_t i) const { return items_.at(i); } // 0 is the oldest

private:
    std::size_t capacity_;
    std::deque<Experience> items_;
};

// sigma_a * tau_d^t
double exploration_noise_scale(int step, double sigma_a, double tau_d);

struct ScheduleState
{
    double reward_target = 0.75;
    std::deque<double> window;
    int train_per_step = 4;
    double actor_lr = 2e-3;
    int triggers = 0;

    static ScheduleState initial(const AgentHyperparams &hp);
};

inline constexpr int kScheduleWindow = 5;
inline constexpr double kScheduleTargetStep = 0.05;
inline constexpr double kScheduleLrDecay = 0.8;

// Pushes an unscaled eta_n reward. When the mean of the last five exceeds the target, the actor
// learning rate shrinks by 0.8, N_train drops by one (never below 1) and the target rises by 0.05.
// Returns true on such a trigger.
bool adaptive_schedule(ScheduleState &schedule, double reward);

// Critic input is the state stacked over the action.
Eigen::MatrixXd critic_input(const Eigen::MatrixXd &states, const Eigen::MatrixXd &actions);

struct CriticPair
{
    std::array<Mlp, 2> online;
    std::array<Mlp, 2> target;
    std::array<Adam, 2> opt;
};

struct DdpgNets
{
    Mlp actor, actor_target, critic, critic_target;
    Adam actor_opt, critic_opt;
};

struct Td3Nets
{
    Mlp actor, actor_target;
    Adam actor_opt;
    CriticPair critics;
};

struct SacNets
{
    Mlp actor; // outputs [mean; log_std]
    Adam actor_opt;
    CriticPair critics;
    double log_alpha = 0.0; // trained by plain gradient descent with AgentHyperparams::alpha_lr

    double alpha() const;
};

struct UpdateStats
{
    double critic_loss = 0.0;
    double critic2_loss = 0.0;
    double actor_loss = 0.0;
    double alpha_loss = 0.0;
    bool actor_updated = false;
    Eigen::RowVectorXd targets;
};

DdpgNets make_ddpg_nets(int state_dim, int action_dim, const AgentHyperparams &hp, Rng &rng);
Td3Nets make_td3_nets(int state_dim, int action_dim, const AgentHyperparams &hp, Rng &rng);
SacNets make_sac_nets(int state_dim, int action_dim, const AgentHyperparams &hp, Rng &rng);

// r' + gamma Q_targ(s', mu_targ(s')).
Eigen::RowVectorXd ddpg_targets(const DdpgNets &nets, const Batch &batch, const AgentHyperparams &hp);
UpdateStats ddpg_update(DdpgNets &nets, const Batch &batch, const AgentHyperparams &hp);

// Target-policy smoothing noise clip(N(0, smoothing_variance), -c, c) for every action entry.
Eigen::MatrixXd td3_smoothing_noise(Rng &rng, Eigen::Index rows, Eigen::Index cols, const AgentHyperparams &hp);
// r' + gamma min_i Q_targ,i(s', clip(mu_targ(s') + noise, -1, 1)).
Eigen::RowVectorXd td3_targets(const Td3Nets &nets, const Batch &batch, const AgentHyperparams &hp,
                               const Eigen::MatrixXd &smoothing_noise);
// Critics every call; actor and all targets only when train_iter % td3_delay == 0.
UpdateStats td3_update(Td3Nets &nets, const Batch &batch, const AgentHyperparams &hp, long train_iter, Rng &rng);

inline double sac_target_entropy(int action_dim)
{
    return -static_cast<double>(action_dim);
}
// d/d(log alpha) of mean(-log_alpha (log_pi + H)) = -mean(log_pi + H). Descending on it raises the
// temperature while the policy entropy estimate -mean(log_pi) is below the target H.
double sac_temperature_gradient(const Eigen::RowVectorXd &log_prob, double target_entropy);
// r' + gamma (min_i Q_targ,i(s', a') - alpha log pi(a'|s')) with a' drawn from the policy.
Eigen::RowVectorXd sac_targets(const SacNets &nets, const Batch &batch, const AgentHyperparams &hp,
                               const Eigen::MatrixXd &policy_noise);
UpdateStats sac_update(SacNets &nets, const Batch &batch, const AgentHyperparams &hp, Rng &rng);

// Common driver interface for the three actor-critic agents.
class Agent
{
public:
    Agent(AgentKind kind, int state_dim, int action_dim, AgentHyperparams hp);
    virtual ~Agent() = default;

    AgentKind kind() const { return kind_; }
    int state_dim() const { return state_dim_; }
    int action_dim() const { return action_dim_; }
    const AgentHyperparams &hyperparams() const { return hp_; }

    // Behaviour action in [-1, 1]^action_dim for step `step` of the current episode.
    virtual Eigen::VectorXd act(const Eigen::VectorXd &state, int step, Rng &rng) = 0;
    // Greedy action without exploration.
    virtual Eigen::VectorXd policy(const Eigen::VectorXd &state) const = 0;
    // One training iteration on a sampled batch.
    virtual UpdateStats train(const Batch &batch, Rng &rng) = 0;

    // Episode boundary: empties the buffer, restores learning rates and the schedule, resets the
    // SAC temperature and redraws DDPG weights from `init_rng`.
    virtual void begin_episode(Rng &init_rng);

    ReplayBuffer &buffer() { return buffer_; }
    const ReplayBuffer &buffer() const { return buffer_; }
    ScheduleState &schedule() { return schedule_; }
    long train_iterations() const { return train_iterations_; }
    // Pushes the schedule's current actor learning rate into the optimizer.
    void apply_schedule() { set_actor_learning_rate(schedule_.actor_lr); }

    // Checkpoint: "riseq-agent 1" header, hyperparameters and counters, then each network in
    // the Mlp snapshot format.
    void save(std::ostream &out) const;
    void load(std::istream &in);

protected:
    virtual void set_actor_learning_rate(double lr) = 0;
    virtual std::vector<std::pair<std::string, Mlp *>> networks() = 0;
    virtual void restore_extra_state() {}
    virtual double log_temperature() const { return 0.0; }
    virtual void set_log_temperature(double) {}

    AgentKind kind_;
    int state_dim_;
    int action_dim_;
    AgentHyperparams hp_;
    ReplayBuffer buffer_;
    ScheduleState schedule_;
    long train_iterations_ = 0;
};

class DdpgAgent final : public Agent
{
public:
    DdpgAgent(int state_dim, int action_dim, AgentHyperparams hp, Rng &init_rng);

    Eigen::VectorXd act(const Eigen::VectorXd &state, int step, Rng &rng) override;
    Eigen::VectorXd policy(const Eigen::VectorXd &state) const override;
    UpdateStats train(const Batch &batch, Rng &rng) override;
    void begin_episode(Rng &init_rng) override;

    DdpgNets &nets() { return nets_; }

protected:
    void set_actor_learning_rate(double lr) override;
    std::vector<std::pair<std::string, Mlp *>> networks() override;

private:
    DdpgNets nets_;
};

class Td3Agent final : public Agent
{
public:
    Td3Agent(int state_dim, int action_dim, AgentHyperparams hp, Rng &init_rng);

    Eigen::VectorXd act(const Eigen::VectorXd &state, int step, Rng &rng) override;
    Eigen::VectorXd policy(const Eigen::VectorXd &state) const override;
    UpdateStats train(const Batch &batch, Rng &rng) override;

    Td3Nets &nets() { return nets_; }

protected:
    void set_actor_learning_rate(double lr) override;
    std::vector<std::pair<std::string, Mlp *>> networks() override;

private:
    Td3Nets nets_;
};

class SacAgent final : public Agent
{
public:
    SacAgent(int state_dim, int action_dim, AgentHyperparams hp, Rng &init_rng);

    Eigen::VectorXd act(const Eigen::VectorXd &state, int step, Rng &rng) override;
    Eigen::VectorXd policy(const Eigen::VectorXd &state) const override;
    UpdateStats train(const Batch &batch, Rng &rng) override;
    void begin_episode(Rng &init_rng) override;

    SacNets &nets() { return nets_; }

protected:
    void set_actor_learning_rate(double lr) override;
    std::vector<std::pair<std::string, Mlp *>> networks() override;
    void restore_extra_state() override;
    double log_temperature() const override { return nets_.log_alpha; }
    void set_log_temperature(double v) override { nets_.log_alpha = v; }

private:
    SacNets nets_;
};

std::unique_ptr<Agent> make_agent(AgentKind kind, int state_dim, int action_dim, const AgentHyperparams &hp,
                                  Rng &init_rng);

// eta and eta_norm are measured on the observed (noisy) pulse; sinr_db is the analytic value of the
// applied configuration.
struct EpisodeStep
{
    int step = 0;
    double eta = 0.0;
    double eta_norm = 0.0;
    double sinr_db = 0.0;
};

struct EpisodeTrace
{
    std::vector<EpisodeStep> steps;
};

struct EpisodeOptions
{
    bool train = true;
    bool reset_agent = true; // call Agent::begin_episode first
};

// Runs one coherence block. The first state comes from an unconfigured surface (all ones).
EpisodeTrace run_episode(Agent &agent, RisEnvironment &env, const EpisodeConfig &config, Rng &policy_rng,
                         Rng &init_rng, EpisodeOptions options = {});

} // namespace riseq
