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

#include "riseq/scenario_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

namespace riseq
{

namespace pt = boost::property_tree;

std::string_view to_string(Algorithm algorithm)
{
    switch (algorithm)
    {
    case Algorithm::arise:
        return "arise";
    case Algorithm::random_phases:
        return "random-phases";
    case Algorithm::inverse_phases:
        return "inverse-phases";
    case Algorithm::ddpg:
        return "ddpg";
    case Algorithm::td3:
        return "td3";
    case Algorithm::sac:
        return "sac";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name)
{
    for (Algorithm a : {Algorithm::arise, Algorithm::random_phases, Algorithm::inverse_phases, Algorithm::ddpg,
                        Algorithm::td3, Algorithm::sac})
        if (name == to_string(a))
            return a;
    if (name == "random")
        return Algorithm::random_phases;
    if (name == "inverse")
        return Algorithm::inverse_phases;
    throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

bool is_agent(Algorithm algorithm)
{
    return algorithm == Algorithm::ddpg || algorithm == Algorithm::td3 || algorithm == Algorithm::sac;
}

AgentKind agent_kind(Algorithm algorithm)
{
    switch (algorithm)
    {
    case Algorithm::ddpg:
        return AgentKind::ddpg;
    case Algorithm::td3:
        return AgentKind::td3;
    case Algorithm::sac:
        return AgentKind::sac;
    default:
        throw ConfigError("algorithm '" + std::string(to_string(algorithm)) + "' is not a learning agent");
    }
}

ScenarioConfig ScenarioConfig::defaults(Algorithm algorithm)
{
    ScenarioConfig c;
    c.algorithm = algorithm;
    c.agent = AgentHyperparams::defaults(is_agent(algorithm) ? agent_kind(algorithm) : AgentKind::sac);
    return c;
}

ScenarioConfig ScenarioConfig::desk_scale(Algorithm algorithm)
{
    ScenarioConfig c = defaults(algorithm);
    c.geometry.elements = 16;
    c.fading.delayed_paths = 4;
    c.agent.hidden = {128, 128};
    return c;
}

EpisodeConfig ScenarioConfig::episode_config() const
{
    EpisodeConfig e;
    e.n_steps = steps;
    e.walk = walk;
    e.reward_scale = agent.reward_scale;
    return e;
}

void ScenarioConfig::validate() const
{
    auto wrap = [](const char *section, const std::function<void()> &check) {
        try
        {
            check();
        }
        catch (const std::exception &e)
        {
            throw ConfigError(std::string("[") + section + "] " + e.what());
        }
    };
    if (episodes < 1)
        throw ConfigError("[scenario] episodes must be >= 1");
    if (steps < 1)
        throw ConfigError("[scenario] steps must be >= 1");
    if (!(sample_period > 0.0))
        throw ConfigError("[scenario] sample_period must be positive");
    wrap("geometry", [&] { geometry.validate(); });
    wrap("fading", [&] { fading.validate(); });
    wrap("walk", [&] {
        if (!(walk.lower.x < walk.upper.x && walk.lower.y < walk.upper.y))
            throw std::invalid_argument("lower corner must lie below the upper corner");
        if (!(walk.max_step > 0.0))
            throw std::invalid_argument("max_step must be positive");
    });
    if (episodes > 1 && !walk.contains(geometry.ue))
        throw ConfigError("[walk] UE start lies outside the walk bounds");
    wrap("arise", [&] { arise.validate(); });
    wrap("agent", [&] { agent.validate(); });
}

bool ScenarioConfig::operator==(const ScenarioConfig &o) const
{
    return algorithm == o.algorithm && seed == o.seed && episodes == o.episodes && steps == o.steps &&
           noise == o.noise && sample_period == o.sample_period && geometry == o.geometry && fading == o.fading &&
           walk == o.walk && arise == o.arise && agent == o.agent;
}

namespace
{

std::string real(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<int> &v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

// Binds one INI key to a config field for both directions.
struct Field
{
    std::string key; // "section.name"
    std::function<std::string(const ScenarioConfig &)> get;
    std::function<void(ScenarioConfig &, const std::string &)> set;
};

double to_real(const std::string &key, const std::string &text)
{
    if (text == "inf" || text == "+inf")
        return INFINITY;
    if (text == "-inf")
        return -INFINITY;
    char *end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || std::isnan(v))
        throw ConfigError(key + ": expected a real number, got '" + text + "'");
    return v;
}

long long to_integer(const std::string &key, const std::string &text)
{
    char *end = nullptr;
    errno = 0;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE)
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return v;
}

int to_int(const std::string &key, const std::string &text)
{
    const long long v = to_integer(key, text);
    if (v < INT32_MIN || v > INT32_MAX)
        throw ConfigError(key + ": integer out of range");
    return static_cast<int>(v);
}

std::uint64_t to_u64(const std::string &key, const std::string &text)
{
    if (text.empty() || text[0] == '-')
        throw ConfigError(key + ": expected an unsigned integer, got '" + text + "'");
    char *end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size() || errno == ERANGE)
        throw ConfigError(key + ": expected an unsigned integer, got '" + text + "'");
    return v;
}

bool to_bool(const std::string &key, const std::string &text)
{
    if (text == "true" || text == "1" || text == "yes")
        return true;
    if (text == "false" || text == "0" || text == "no")
        return false;
    throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<int> to_int_list(const std::string &key, const std::string &text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        out.push_back(to_int(key, b == std::string::npos ? "" : item.substr(b, e - b + 1)));
    }
    if (out.empty())
        throw ConfigError(key + ": expected a comma-separated list");
    return out;
}

#define RISEQ_REAL(KEY, EXPR)                                                                               \
    Field{KEY, [](const ScenarioConfig &c) { return real(c.EXPR); },                                         \
          [](ScenarioConfig &c, const std::string &v) { c.EXPR = to_real(KEY, v); }}
#define RISEQ_INT(KEY, EXPR)                                                                                \
    Field{KEY, [](const ScenarioConfig &c) { return std::to_string(c.EXPR); },                               \
          [](ScenarioConfig &c, const std::string &v) { c.EXPR = to_int(KEY, v); }}
#define RISEQ_BOOL(KEY, EXPR)                                                                               \
    Field{KEY, [](const ScenarioConfig &c) { return std::string(c.EXPR ? "true" : "false"); },               \
          [](ScenarioConfig &c, const std::string &v) { c.EXPR = to_bool(KEY, v); }}

const std::vector<Field> &fields()
{
    static const std::vector<Field> table = {
        Field{"scenario.seed", [](const ScenarioConfig &c) { return std::to_string(c.seed); },
              [](ScenarioConfig &c, const std::string &v) { c.seed = to_u64("scenario.seed", v); }},
        RISEQ_INT("scenario.episodes", episodes),
        RISEQ_INT("scenario.steps", steps),
        RISEQ_BOOL("scenario.noise", noise),
        RISEQ_REAL("scenario.sample_period", sample_period),

        RISEQ_REAL("geometry.bs_x", geometry.bs.x),
        RISEQ_REAL("geometry.bs_y", geometry.bs.y),
        RISEQ_REAL("geometry.ris_x", geometry.ris.x),
        RISEQ_REAL("geometry.ris_y", geometry.ris.y),
        RISEQ_REAL("geometry.ue_x", geometry.ue.x),
        RISEQ_REAL("geometry.ue_y", geometry.ue.y),
        RISEQ_INT("geometry.elements", geometry.elements),
        RISEQ_REAL("geometry.element_spacing", geometry.element_spacing),
        RISEQ_REAL("geometry.carrier_hz", geometry.carrier_hz),
        RISEQ_REAL("geometry.light_speed", geometry.light_speed),

        RISEQ_REAL("fading.kappa", fading.kappa),
        RISEQ_INT("fading.delayed_paths", fading.delayed_paths),
        RISEQ_REAL("fading.pdp_rate", fading.pdp_rate),
        RISEQ_REAL("fading.pathloss_exponent", fading.pathloss_exponent),
        RISEQ_REAL("fading.gain_db", fading.gain_db),
        RISEQ_REAL("fading.ris_gain_db", fading.ris_gain_db),
        RISEQ_REAL("fading.noise_dbm", fading.noise_dbm),
        RISEQ_BOOL("fading.direct_link", fading.direct_link),

        RISEQ_REAL("walk.lower_x", walk.lower.x),
        RISEQ_REAL("walk.lower_y", walk.lower.y),
        RISEQ_REAL("walk.upper_x", walk.upper.x),
        RISEQ_REAL("walk.upper_y", walk.upper.y),
        RISEQ_REAL("walk.max_step", walk.max_step),

        RISEQ_REAL("arise.scale_factor", arise.scale_factor),
        RISEQ_REAL("arise.step_scale", arise.step_scale),
        RISEQ_REAL("arise.threshold", arise.threshold),
        RISEQ_REAL("arise.overshoot", arise.overshoot),
        RISEQ_INT("arise.patience", arise.patience),
        RISEQ_INT("arise.max_iters", arise.max_iters),
        Field{"arise.start", [](const ScenarioConfig &c) { return std::string(to_string(c.arise.start)); },
              [](ScenarioConfig &c, const std::string &v) {
                  try
                  {
                      c.arise.start = parse_arise_start(v);
                  }
                  catch (const std::invalid_argument &e)
                  {
                      throw ConfigError(std::string("arise.start: ") + e.what());
                  }
              }},

        Field{"agent.hidden", [](const ScenarioConfig &c) { return join(c.agent.hidden); },
              [](ScenarioConfig &c, const std::string &v) { c.agent.hidden = to_int_list("agent.hidden", v); }},
        RISEQ_BOOL("agent.layer_norm", agent.layer_norm),
        RISEQ_REAL("agent.init_std", agent.init_std),
        RISEQ_INT("agent.train_per_step", agent.train_per_step),
        RISEQ_INT("agent.batch_size", agent.batch_size),
        Field{"agent.buffer_capacity", [](const ScenarioConfig &c) { return std::to_string(c.agent.buffer_capacity); },
              [](ScenarioConfig &c, const std::string &v) {
                  c.agent.buffer_capacity = to_u64("agent.buffer_capacity", v);
              }},
        RISEQ_INT("agent.td3_delay", agent.td3_delay),
        RISEQ_REAL("agent.action_noise", agent.action_noise),
        RISEQ_REAL("agent.noise_decay", agent.noise_decay),
        RISEQ_REAL("agent.smoothing_variance", agent.smoothing_variance),
        RISEQ_REAL("agent.smoothing_clip", agent.smoothing_clip),
        RISEQ_REAL("agent.critic_lr", agent.critic_lr),
        RISEQ_REAL("agent.actor_lr", agent.actor_lr),
        RISEQ_REAL("agent.alpha_lr", agent.alpha_lr),
        RISEQ_REAL("agent.initial_alpha", agent.initial_alpha),
        RISEQ_REAL("agent.tau", agent.tau),
        RISEQ_REAL("agent.discount", agent.discount),
        RISEQ_REAL("agent.reward_scale", agent.reward_scale),
    };
    return table;
}

#undef RISEQ_REAL
#undef RISEQ_INT
#undef RISEQ_BOOL

} // namespace

std::string render_config(const ScenarioConfig &config)
{
    pt::ptree tree;
    tree.put("scenario.algorithm", std::string(to_string(config.algorithm)));
    for (const Field &f : fields())
        tree.put(f.key, f.get(config));
    std::ostringstream out;
    pt::write_ini(out, tree);
    return out.str();
}

ScenarioConfig parse_config(std::string_view text, std::optional<Algorithm> algorithm_override)
{
    pt::ptree tree;
    try
    {
        std::istringstream in{std::string(text)};
        pt::read_ini(in, tree);
    }
    catch (const pt::ini_parser_error &e)
    {
        throw ConfigError(std::string("config: ") + e.what());
    }

    Algorithm algorithm = Algorithm::arise;
    if (auto name = tree.get_optional<std::string>("scenario.algorithm"))
        algorithm = parse_algorithm(*name);
    if (algorithm_override)
        algorithm = *algorithm_override;
    ScenarioConfig config = ScenarioConfig::defaults(algorithm);

    std::set<std::string> known{"scenario.algorithm"};
    for (const Field &f : fields())
    {
        known.insert(f.key);
        if (auto v = tree.get_optional<std::string>(f.key))
            f.set(config, *v);
    }
    for (const auto &[section, body] : tree)
    {
        if (!body.data().empty())
            throw ConfigError("config: key '" + section + "' must sit inside a section");
        for (const auto &[name, _] : body)
            if (!known.count(section + "." + name))
                throw ConfigError("config: unknown key '" + section + "." + name + "'");
    }
    config.validate();
    return config;
}

ScenarioConfig load_config(const std::string &path, std::optional<Algorithm> algorithm_override)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try
    {
        return parse_config(ss.str(), algorithm_override);
    }
    catch (const ConfigError &e)
    {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace riseq
