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

#include "riseq/agents.hpp"
#include "riseq/arise.hpp"
#include "riseq/channel_model.hpp"
#include "riseq/ris_env.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace riseq
{

enum class Algorithm
{
    arise,
    random_phases,
    inverse_phases,
    ddpg,
    td3,
    sac,
};

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);
bool is_agent(Algorithm algorithm);
AgentKind agent_kind(Algorithm algorithm);

// Thrown on invalid configuration text or values; the message names the offending key.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct ScenarioConfig
{
    Algorithm algorithm = Algorithm::arise;
    std::uint64_t seed = 1;
    int episodes = 1;
    int steps = 2000;
    bool noise = true;
    double sample_period = 16.3e-9;

    Geometry geometry;
    FadingParams fading;
    WalkBounds walk;
    AriseConfig arise;
    AgentHyperparams agent = AgentHyperparams::defaults(AgentKind::sac);

    // Defaults with the agent hyperparameters of `algorithm`.
    static ScenarioConfig defaults(Algorithm algorithm);

    // Desk-scale learning setup: M=16, n_r=4, hidden width 128.
    static ScenarioConfig desk_scale(Algorithm algorithm);

    EpisodeConfig episode_config() const;
    double noise_power() const { return noise ? fading.noise_power() : 0.0; }

    // Throws ConfigError naming the first invalid field.
    void validate() const;

    bool operator==(const ScenarioConfig &other) const;
};

// INI text with sections [scenario], [geometry], [fading], [walk], [arise] and [agent]. Reals are
// written with 17 significant digits so parse(render(c)) == c.
std::string render_config(const ScenarioConfig &config);

// Keys absent from `text` keep the defaults of the algorithm named in [scenario] algorithm, or of
// `algorithm_override` when given (which also wins over the file's value).
ScenarioConfig parse_config(std::string_view text, std::optional<Algorithm> algorithm_override = std::nullopt);

ScenarioConfig load_config(const std::string &path, std::optional<Algorithm> algorithm_override = std::nullopt);

} // namespace riseq
