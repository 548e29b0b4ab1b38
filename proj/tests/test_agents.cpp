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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace riseq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

Eigen::MatrixXd random_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0)
{
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m.data()[i] = scale * rng.normal();
    return m;
}

Experience experience(int dim_s, int dim_a, double reward)
{
    return {Eigen::VectorXd::Constant(dim_s, reward), Eigen::VectorXd::Zero(dim_a), reward,
            Eigen::VectorXd::Zero(dim_s)};
}

Batch random_batch(Rng &rng, int dim_s, int dim_a, int n)
{
    Batch b;
    b.states = random_matrix(rng, dim_s, n);
    b.actions = random_matrix(rng, dim_a, n, 0.5).array().tanh();
    b.rewards = random_matrix(rng, 1, n, 10.0);
    b.next_states = random_matrix(rng, dim_s, n);
    return b;
}

void randomize(Mlp &net, Rng &rng, double scale)
{
    Eigen::VectorXd p(net.size());
    for (Eigen::Index i = 0; i < p.size(); ++i)
        p(i) = scale * rng.normal();
    net.set_parameters(p);
}

AgentHyperparams small(AgentKind kind)
{
    AgentHyperparams hp = AgentHyperparams::defaults(kind);
    hp.hidden = {16, 16};
    return hp;
}

RisEnvironment small_environment(std::uint64_t seed, double noise_scale = 1.0)
{
    FadingParams f;
    f.delayed_paths = 2;
    Geometry g;
    g.elements = 4;
    Rng rng(seed);
    return RisEnvironment(sample_channels(rng, g, f), noise_scale * f.noise_power(), Rng(seed + 1));
}

bool all_finite(const std::vector<const Mlp *> &nets)
{
    for (const Mlp *n : nets)
        if (!n->parameters().allFinite())
            return false;
    return true;
}

// Scalar two-layer network (ReLU hidden) used as an independent oracle.
struct Dense
{
    std::vector<std::vector<double>> w; // w[out][in]
    std::vector<double> b;
};

struct Tiny
{
    Dense hidden;
    Dense out;
    bool tanh_output = false;
};

Dense read_layer(const Mlp &net, int l)
{
    const auto w = net.weight(l);
    const auto b = net.bias(l);
    Dense d;
    d.w.assign(w.rows(), std::vector<double>(w.cols()));
    d.b.resize(b.size());
    for (Eigen::Index i = 0; i < w.rows(); ++i)
    {
        d.b[i] = b(i);
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            d.w[i][j] = w(i, j);
    }
    return d;
}

Tiny read_tiny(const Mlp &net, bool tanh_output)
{
    return {read_layer(net, 0), read_layer(net, 1), tanh_output};
}

struct TinyForward
{
    std::vector<double> x, pre, h, z, y;
};

TinyForward tiny_forward(const Tiny &t, const std::vector<double> &x)
{
    TinyForward f;
    f.x = x;
    for (std::size_t i = 0; i < t.hidden.b.size(); ++i)
    {
        double s = t.hidden.b[i];
        for (std::size_t j = 0; j < x.size(); ++j)
            s += t.hidden.w[i][j] * x[j];
        f.pre.push_back(s);
        f.h.push_back(s > 0.0 ? s : 0.0);
    }
    for (std::size_t i = 0; i < t.out.b.size(); ++i)
    {
        double s = t.out.b[i];
        for (std::size_t j = 0; j < f.h.size(); ++j)
            s += t.out.w[i][j] * f.h[j];
        f.z.push_back(s);
        f.y.push_back(t.tanh_output ? std::tanh(s) : s);
    }
    return f;
}

// Accumulates parameter gradients for dL/dy = gy; returns dL/dx.
std::vector<double> tiny_backward(const Tiny &t, const TinyForward &f, const std::vector<double> &gy, Tiny &grad)
{
    std::vector<double> gz(gy.size()), gh(f.h.size(), 0.0), gx(f.x.size(), 0.0);
    for (std::size_t i = 0; i < gy.size(); ++i)
        gz[i] = t.tanh_output ? gy[i] * (1.0 - f.y[i] * f.y[i]) : gy[i];
    for (std::size_t i = 0; i < gz.size(); ++i)
    {
        grad.out.b[i] += gz[i];
        for (std::size_t j = 0; j < f.h.size(); ++j)
        {
            grad.out.w[i][j] += gz[i] * f.h[j];
            gh[j] += gz[i] * t.out.w[i][j];
        }
    }
    for (std::size_t i = 0; i < gh.size(); ++i)
    {
        const double gp = f.pre[i] > 0.0 ? gh[i] : 0.0;
        grad.hidden.b[i] += gp;
        for (std::size_t j = 0; j < f.x.size(); ++j)
        {
            grad.hidden.w[i][j] += gp * f.x[j];
            gx[j] += gp * t.hidden.w[i][j];
        }
    }
    return gx;
}

Tiny zeros_like(const Tiny &t)
{
    Tiny z = t;
    for (Dense *d : {&z.hidden, &z.out})
    {
        for (auto &row : d->w)
            std::fill(row.begin(), row.end(), 0.0);
        std::fill(d->b.begin(), d->b.end(), 0.0);
    }
    return z;
}

// First Adam step from zero moments, then elementwise map over all parameters.
template <class F> void for_each_param(Tiny &a, const Tiny &b, F f)
{
    auto layer = [&](Dense &x, const Dense &y) {
        for (std::size_t i = 0; i < x.b.size(); ++i)
        {
            f(x.b[i], y.b[i]);
            for (std::size_t j = 0; j < x.w[i].size(); ++j)
                f(x.w[i][j], y.w[i][j]);
        }
    };
    layer(a.hidden, b.hidden);
    layer(a.out, b.out);
}

struct TinyAdam
{
    Tiny m, v;
    int t = 0;

    explicit TinyAdam(const Tiny &shape) : m(zeros_like(shape)), v(zeros_like(shape)) {}

    void step(Tiny &net, const Tiny &grad, double lr)
    {
        const AdamConfig c{};
        ++t;
        const double c1 = 1.0 - std::pow(c.beta1, t);
        const double c2 = 1.0 - std::pow(c.beta2, t);
        for_each_param(m, grad, [&](double &x, double g) { x = c.beta1 * x + (1.0 - c.beta1) * g; });
        for_each_param(v, grad, [&](double &x, double g) { x = c.beta2 * x + (1.0 - c.beta2) * g * g; });
        Tiny ratio = m;
        Tiny vv = v;
        for_each_param(ratio, vv, [&](double &x, double vi) { x = (x / c1) / (std::sqrt(vi / c2) + c.epsilon); });
        for_each_param(net, ratio, [&](double &p, double r) { p -= lr * r; });
    }
};

double max_difference(const Tiny &t, const Mlp &net)
{
    Tiny got = read_tiny(net, t.tanh_output);
    double worst = 0.0;
    for_each_param(got, t, [&](double &a, double b) { worst = std::max(worst, std::abs(a - b)); });
    return worst;
}

std::vector<double> column(const Eigen::MatrixXd &m, Eigen::Index c)
{
    return {m.col(c).data(), m.col(c).data() + m.rows()};
}

} // namespace

TEST_CASE("hyperparameter defaults")
{
    const AgentHyperparams ddpg = AgentHyperparams::defaults(AgentKind::ddpg);
    const AgentHyperparams td3 = AgentHyperparams::defaults(AgentKind::td3);
    CHECK(ddpg.actor_lr == 1e-3);
    CHECK(td3.actor_lr == 2e-3);
    CHECK(AgentHyperparams::defaults(AgentKind::sac).actor_lr == 2e-3);
    CHECK(td3.batch_size == 4);
    CHECK(td3.buffer_capacity == 400);
    CHECK(td3.td3_delay == 2);
    CHECK(td3.reward_scale == 100.0);
    CHECK(parse_agent_kind("td3") == AgentKind::td3);
    CHECK_THROWS(parse_agent_kind("ppo"));

    AgentHyperparams bad = td3;
    bad.tau = 0.0;
    CHECK_THROWS(bad.validate());
    bad = td3;
    bad.td3_delay = 0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("replay buffer")
{
    SECTION("FIFO eviction")
    {
        ReplayBuffer buf(400);
        for (int i = 0; i <= 400; ++i)
            buf.push(experience(2, 2, i));
        CHECK(buf.size() == 400);
        CHECK(buf.at(0).reward == 1.0);
        CHECK(buf.at(399).reward == 400.0);
    }
    SECTION("single record")
    {
        ReplayBuffer buf(10);
        buf.push(experience(2, 2, 7.0));
        Rng rng(1);
        const Batch b = buf.sample(rng, 1);
        CHECK(b.size() == 1);
        CHECK(b.rewards(0) == 7.0);
        CHECK(b.states(0, 0) == 7.0);
    }
    SECTION("batch size and insufficient data")
    {
        ReplayBuffer buf(10);
        Rng rng(2);
        for (int i = 0; i < 3; ++i)
            buf.push(experience(3, 2, i));
        CHECK_THROWS_AS(buf.sample(rng, 4), InsufficientData);
        buf.push(experience(3, 2, 3));
        const Batch b = buf.sample(rng, 4);
        CHECK(b.size() == 4);
        CHECK(b.states.rows() == 3);
        CHECK(b.actions.rows() == 2);
        CHECK_THROWS(buf.push(experience(4, 2, 0)));
        buf.clear();
        CHECK(buf.size() == 0);
    }
    SECTION("uniform sampling")
    {
        ReplayBuffer buf(10);
        for (int i = 0; i < 10; ++i)
            buf.push(experience(1, 1, i));
        Rng rng(3);
        const int draws = 100000;
        std::array<int, 10> counts{};
        for (int i = 0; i < draws / 4; ++i)
        {
            const Batch b = buf.sample(rng, 4);
            for (int j = 0; j < 4; ++j)
                ++counts[static_cast<std::size_t>(b.rewards(j))];
        }
        const double sigma = std::sqrt(0.1 * 0.9 / draws);
        for (int c : counts)
            CHECK(std::abs(c / double(draws) - 0.1) < 3.0 * sigma);
    }
}

TEST_CASE("exploration noise and target tracking")
{
    CHECK(exploration_noise_scale(0, 0.3, 0.999) == 0.3);
    CHECK_THAT(exploration_noise_scale(1, 0.3, 0.999), WithinAbs(0.2997, 1e-15));
    double prev = 1.0;
    for (int t = 0; t < 3000; t += 7)
    {
        const double s = exploration_noise_scale(t, 0.3, 0.999);
        CHECK(s <= prev);
        prev = s;
    }

    Rng rng(4);
    Mlp online({{3, 5, 2}, false, OutputActivation::linear}, rng);
    Mlp target({{3, 5, 2}, false, OutputActivation::linear}, rng);
    const Eigen::VectorXd t0 = target.parameters();
    const double tau = 0.001;
    const int k = 500;
    for (int i = 0; i < k; ++i)
        polyak_update(target, online, tau);
    const double keep = std::pow(1.0 - tau, k);
    const Eigen::VectorXd expected = (1.0 - keep) * online.parameters() + keep * t0;
    CHECK((target.parameters() - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("adaptive schedule")
{
    const AgentHyperparams hp = AgentHyperparams::defaults(AgentKind::td3);

    SECTION("one trigger")
    {
        ScheduleState s = ScheduleState::initial(hp);
        int triggers = 0;
        for (int i = 0; i < 5; ++i)
            triggers += adaptive_schedule(s, 0.8);
        CHECK(triggers == 1);
        CHECK(s.train_per_step == 3);
        CHECK_THAT(s.reward_target, WithinAbs(0.80, 1e-15));
        CHECK_THAT(s.actor_lr, WithinRel(0.8 * 2e-3, 1e-15));
    }
    SECTION("rewards below target")
    {
        ScheduleState s = ScheduleState::initial(hp);
        for (int i = 0; i < 50; ++i)
            CHECK_FALSE(adaptive_schedule(s, 0.7));
        CHECK(s.train_per_step == 4);
        CHECK(s.actor_lr == 2e-3);
        CHECK(s.reward_target == 0.75);
    }
    SECTION("N_train floor")
    {
        ScheduleState s = ScheduleState::initial(hp);
        for (int i = 0; i < 1000; ++i)
            adaptive_schedule(s, 1.0);
        CHECK(s.train_per_step == 1);
        CHECK(s.triggers >= 4);
    }
}

TEST_CASE("DDPG update")
{
    Rng rng(5);
    AgentHyperparams hp = AgentHyperparams::defaults(AgentKind::ddpg);
    hp.hidden = {8};

    SECTION("zero discount gives the reward as target")
    {
        hp.discount = 0.0;
        DdpgNets nets = make_ddpg_nets(3, 2, hp, rng);
        const Batch b = random_batch(rng, 3, 2, 4);
        CHECK(ddpg_targets(nets, b, hp) == b.rewards);
    }
    SECTION("critic already at the target")
    {
        hp.discount = 0.0;
        DdpgNets nets = make_ddpg_nets(3, 2, hp, rng);
        Batch b = random_batch(rng, 3, 2, 4);
        b.rewards = nets.critic.forward(critic_input(b.states, b.actions));
        const Eigen::VectorXd critic_before = nets.critic.parameters();
        const UpdateStats s = ddpg_update(nets, b, hp);
        CHECK(s.critic_loss == 0.0);
        CHECK(nets.critic.parameters() == critic_before);
    }
    SECTION("miniature network against a hand computation")
    {
        hp.hidden = {2};
        hp.layer_norm = false;
        hp.discount = 0.9;
        hp.tau = 0.3;
        DdpgNets nets = make_ddpg_nets(2, 2, hp, rng);
        for (Mlp *n : {&nets.actor, &nets.actor_target, &nets.critic, &nets.critic_target})
            randomize(*n, rng, 0.8);

        Tiny actor = read_tiny(nets.actor, true);
        Tiny actor_t = read_tiny(nets.actor_target, true);
        Tiny critic = read_tiny(nets.critic, false);
        Tiny critic_t = read_tiny(nets.critic_target, false);
        TinyAdam actor_opt(actor);
        TinyAdam critic_opt(critic);

        for (int round = 0; round < 2; ++round)
        {
            const Batch b = random_batch(rng, 2, 2, 3);
            const int n = b.size();
            std::vector<double> y(n);
            Tiny g_critic = zeros_like(critic);
            double loss = 0.0;
            for (int j = 0; j < n; ++j)
            {
                const auto sp = column(b.next_states, j);
                auto in_t = sp;
                for (double a : tiny_forward(actor_t, sp).y)
                    in_t.push_back(a);
                y[j] = b.rewards(j) + 0.9 * tiny_forward(critic_t, in_t).y[0];
                auto in = column(b.states, j);
                for (double a : column(b.actions, j))
                    in.push_back(a);
                const TinyForward f = tiny_forward(critic, in);
                const double err = f.y[0] - y[j];
                loss += err * err / n;
                tiny_backward(critic, f, {2.0 * err / n}, g_critic);
            }
            critic_opt.step(critic, g_critic, hp.critic_lr);

            Tiny g_actor = zeros_like(actor);
            for (int j = 0; j < n; ++j)
            {
                const auto st = column(b.states, j);
                const TinyForward fa = tiny_forward(actor, st);
                auto in = st;
                for (double a : fa.y)
                    in.push_back(a);
                const TinyForward fc = tiny_forward(critic, in);
                Tiny scratch = zeros_like(critic);
                const auto gin = tiny_backward(critic, fc, {-1.0 / n}, scratch);
                tiny_backward(actor, fa, {gin[2], gin[3]}, g_actor);
            }
            actor_opt.step(actor, g_actor, hp.actor_lr);

            for_each_param(actor_t, actor, [](double &t, double o) { t = 0.3 * o + 0.7 * t; });
            for_each_param(critic_t, critic, [](double &t, double o) { t = 0.3 * o + 0.7 * t; });

            const UpdateStats s = ddpg_update(nets, b, hp);
            for (int j = 0; j < n; ++j)
                CHECK_THAT(s.targets(j), WithinAbs(y[j], 1e-12));
            CHECK_THAT(s.critic_loss, WithinRel(loss, 1e-12));
            CHECK(max_difference(critic, nets.critic) < 1e-12);
            CHECK(max_difference(actor, nets.actor) < 1e-12);
            CHECK(max_difference(critic_t, nets.critic_target) < 1e-12);
            CHECK(max_difference(actor_t, nets.actor_target) < 1e-12);
        }
    }
}

TEST_CASE("TD3 update")
{
    Rng rng(6);
    AgentHyperparams hp = AgentHyperparams::defaults(AgentKind::td3);
    hp.hidden = {8};

    SECTION("delayed policy updates")
    {
        Td3Nets nets = make_td3_nets(3, 2, hp, rng);
        const Batch b = random_batch(rng, 3, 2, 4);
        const Eigen::VectorXd actor0 = nets.actor.parameters();
        const Eigen::VectorXd target0 = nets.critics.target[0].parameters();
        const Eigen::VectorXd critic0 = nets.critics.online[1].parameters();
        const UpdateStats odd = td3_update(nets, b, hp, 1, rng);
        CHECK_FALSE(odd.actor_updated);
        CHECK(nets.actor.parameters() == actor0);
        CHECK(nets.critics.target[0].parameters() == target0);
        CHECK(nets.critics.online[1].parameters() != critic0);
        const UpdateStats even = td3_update(nets, b, hp, 2, rng);
        CHECK(even.actor_updated);
        CHECK(nets.actor.parameters() != actor0);
        CHECK(nets.critics.target[0].parameters() != target0);
    }
    SECTION("twin critics")
    {
        Td3Nets nets = make_td3_nets(3, 2, hp, rng);
        const Batch b = random_batch(rng, 3, 2, 4);
        const Eigen::MatrixXd noise = td3_smoothing_noise(rng, 2, 4, hp);
        const Eigen::RowVectorXd y = td3_targets(nets, b, hp, noise);

        Td3Nets swapped = nets;
        std::swap(swapped.critics.target[0], swapped.critics.target[1]);
        std::swap(swapped.critics.online[0], swapped.critics.online[1]);
        CHECK(td3_targets(swapped, b, hp, noise) == y);

        Td3Nets twins = nets;
        twins.critics.target[1] = twins.critics.target[0];
        const Eigen::MatrixXd a = (twins.actor_target.forward(b.next_states) + noise).cwiseMax(-1.0).cwiseMin(1.0);
        const Eigen::RowVectorXd single =
            b.rewards + hp.discount * twins.critics.target[0].forward(critic_input(b.next_states, a));
        CHECK((td3_targets(twins, b, hp, noise) - single).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("smoothing noise is clipped")
    {
        const Eigen::MatrixXd noise = td3_smoothing_noise(rng, 10, 10000, hp);
        CHECK(noise.maxCoeff() <= 0.5);
        CHECK(noise.minCoeff() >= -0.5);
        CHECK(noise.maxCoeff() == 0.5); // sd ~0.55, so the clip is reached
        CHECK(std::abs(noise.mean()) < 0.01);
    }
}

TEST_CASE("SAC update")
{
    Rng rng(7);
    AgentHyperparams hp = AgentHyperparams::defaults(AgentKind::sac);
    hp.hidden = {8};

    CHECK(sac_target_entropy(200) == -200.0);

    SECTION("zero temperature with identical twins")
    {
        SacNets nets = make_sac_nets(3, 2, hp, rng);
        nets.critics.target[1] = nets.critics.target[0];
        nets.log_alpha = -std::numeric_limits<double>::infinity();
        CHECK(nets.alpha() == 0.0);
        const Batch b = random_batch(rng, 3, 2, 4);
        const Eigen::MatrixXd noise = random_matrix(rng, 2, 4);
        const PolicySample a = gaussian_policy_evaluate(split_policy_head(nets.actor.forward(b.next_states)), noise);
        const Eigen::RowVectorXd expected =
            b.rewards + hp.discount * nets.critics.target[0].forward(critic_input(b.next_states, a.action));
        CHECK((sac_targets(nets, b, hp, noise) - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("temperature gradient")
    {
        const double h = sac_target_entropy(8);
        const Eigen::RowVectorXd at_target = Eigen::RowVectorXd::Constant(4, -h);
        CHECK(sac_temperature_gradient(at_target, h) == 0.0);
        // log pi above -H means the entropy estimate is below the target: log alpha must rise
        const Eigen::RowVectorXd low_entropy = Eigen::RowVectorXd::Constant(4, -h + 1.0);
        CHECK(sac_temperature_gradient(low_entropy, h) < 0.0);
        const Eigen::RowVectorXd high_entropy = Eigen::RowVectorXd::Constant(4, -h - 1.0);
        CHECK(sac_temperature_gradient(high_entropy, h) > 0.0);
    }
    SECTION("update moves the temperature and keeps target actors absent")
    {
        SacNets nets = make_sac_nets(3, 2, hp, rng);
        const Batch b = random_batch(rng, 3, 2, 4);
        const double before = nets.log_alpha;
        const UpdateStats s = sac_update(nets, b, hp, rng);
        CHECK(nets.log_alpha != before);
        CHECK(std::abs(nets.log_alpha - before) <= hp.alpha_lr * 100.0);
        CHECK(std::isfinite(s.alpha_loss));
        CHECK(s.actor_updated);
    }
}

TEST_CASE("training keeps parameters finite")
{
    for (AgentKind kind : {AgentKind::ddpg, AgentKind::td3, AgentKind::sac})
    {
        Rng init(8);
        Rng rng(9);
        auto agent = make_agent(kind, 6, 8, small(kind), init);
        for (int i = 0; i < 200; ++i)
        {
            Batch b = random_batch(rng, 6, 8, 4);
            b.rewards *= 10.0;
            agent->train(b, rng);
        }
        CHECK(agent->train_iterations() == 200);
        std::vector<const Mlp *> nets;
        if (auto *d = dynamic_cast<DdpgAgent *>(agent.get()))
            nets = {&d->nets().actor, &d->nets().critic, &d->nets().actor_target, &d->nets().critic_target};
        else if (auto *t = dynamic_cast<Td3Agent *>(agent.get()))
            nets = {&t->nets().actor, &t->nets().critics.online[0], &t->nets().critics.online[1],
                    &t->nets().critics.target[0]};
        else if (auto *s = dynamic_cast<SacAgent *>(agent.get()))
        {
            nets = {&s->nets().actor, &s->nets().critics.online[0], &s->nets().critics.target[1]};
            CHECK(std::isfinite(s->nets().log_alpha));
        }
        CHECK(all_finite(nets));
    }
}

TEST_CASE("actions lie in the unit box")
{
    for (AgentKind kind : {AgentKind::ddpg, AgentKind::td3, AgentKind::sac})
    {
        Rng init(10);
        Rng rng(11);
        AgentHyperparams hp = small(kind);
        hp.action_noise = 5.0;
        auto agent = make_agent(kind, 6, 8, hp, init);
        double worst = 0.0;
        for (int t = 0; t < 200; ++t)
            worst = std::max(worst, agent->act(random_matrix(rng, 6, 1, 3.0).col(0), t, rng).cwiseAbs().maxCoeff());
        CHECK(worst <= 1.0);
        if (kind == AgentKind::sac)
            CHECK(worst < 1.0);
    }
}

TEST_CASE("episodes")
{
    EpisodeConfig cfg;

    SECTION("default length and buffered rewards")
    {
        RisEnvironment env = small_environment(12);
        Rng init(13);
        Rng policy(14);
        auto agent = make_agent(AgentKind::td3, env.state_dim(), env.action_dim(), small(AgentKind::td3), init);
        const EpisodeTrace trace = run_episode(*agent, env, cfg, policy, init);
        REQUIRE(trace.steps.size() == 2000);
        CHECK(agent->buffer().size() == 400);
        // the newest buffered transition is the last step
        CHECK_THAT(agent->buffer().at(399).reward, WithinAbs(100.0 * trace.steps.back().eta_norm, 1e-12));
        for (const EpisodeStep &s : trace.steps)
        {
            CHECK(s.eta_norm >= -1.0);
            CHECK(s.eta_norm <= 1.0);
        }
    }
    SECTION("fixed policy on a static noiseless link")
    {
        cfg.n_steps = 50;
        RisEnvironment env = small_environment(15, 0.0);
        Rng init(16);
        Rng policy(17);
        AgentHyperparams hp = small(AgentKind::ddpg);
        hp.action_noise = 0.0;
        DdpgAgent agent(env.state_dim(), env.action_dim(), hp, init);
        Mlp &actor = agent.nets().actor_target;
        randomize(actor, init, 0.5);
        Eigen::VectorXd p = actor.parameters();
        const auto w = actor.weight(2);
        const Eigen::Index at = w.data() - actor.parameters().data();
        p.segment(at, w.size()).setZero();
        actor.set_parameters(p);
        const EpisodeTrace trace = run_episode(agent, env, cfg, policy, init, {.train = false, .reset_agent = false});
        for (const EpisodeStep &s : trace.steps)
        {
            CHECK(s.eta_norm == trace.steps.front().eta_norm);
            CHECK(s.eta == trace.steps.front().eta);
        }
        CHECK(agent.buffer().size() == 50);
    }
    SECTION("episode-start reset")
    {
        cfg.n_steps = 30;
        RisEnvironment env = small_environment(18);
        Rng init(19);
        Rng policy(20);

        DdpgAgent ddpg(env.state_dim(), env.action_dim(), small(AgentKind::ddpg), init);
        run_episode(ddpg, env, cfg, policy, init);
        const Eigen::VectorXd trained = ddpg.nets().actor.parameters();
        CHECK(ddpg.buffer().size() == 30);
        ddpg.schedule().actor_lr = 1e-9;
        Rng fresh = init;
        const DdpgNets expected = make_ddpg_nets(env.state_dim(), env.action_dim(), ddpg.hyperparams(), fresh);
        ddpg.begin_episode(init);
        CHECK(ddpg.buffer().size() == 0);
        CHECK(ddpg.nets().actor.parameters() != trained);
        CHECK(ddpg.nets().actor.parameters() == expected.actor.parameters());
        CHECK(ddpg.nets().critic.parameters() == expected.critic.parameters());
        CHECK(ddpg.schedule().actor_lr == ddpg.hyperparams().actor_lr);
        CHECK(ddpg.nets().actor_opt.learning_rate() == ddpg.hyperparams().actor_lr);

        SacAgent sac(env.state_dim(), env.action_dim(), small(AgentKind::sac), init);
        run_episode(sac, env, cfg, policy, init);
        CHECK(sac.nets().log_alpha != 0.0);
        sac.nets().log_alpha = 3.0;
        sac.begin_episode(init);
        CHECK(sac.nets().alpha() == 1.0);
        CHECK(sac.buffer().size() == 0);
    }
}

TEST_CASE("checkpoints round-trip")
{
    for (AgentKind kind : {AgentKind::ddpg, AgentKind::td3, AgentKind::sac})
    {
        Rng init(21);
        Rng rng(22);
        auto agent = make_agent(kind, 6, 4, small(kind), init);
        for (int i = 0; i < 10; ++i)
            agent->train(random_batch(rng, 6, 4, 4), rng);
        std::stringstream ss;
        agent->save(ss);

        Rng other(99);
        auto restored = make_agent(kind, 6, 4, small(kind), other);
        restored->load(ss);
        CHECK(restored->train_iterations() == 10);
        const Eigen::VectorXd s = random_matrix(rng, 6, 1).col(0);
        CHECK(restored->policy(s) == agent->policy(s));
        if (kind == AgentKind::sac)
            CHECK(dynamic_cast<SacAgent &>(*restored).nets().log_alpha ==
                  dynamic_cast<SacAgent &>(*agent).nets().log_alpha);

        std::stringstream wrong;
        agent->save(wrong);
        auto mismatched = make_agent(kind, 6, 2, small(kind), other);
        CHECK_THROWS(mismatched->load(wrong));
    }
}
