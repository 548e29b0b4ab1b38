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

#include "riseq/experiments.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace riseq;

namespace
{

struct Common
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "riseq_out";
    std::optional<int> episodes;
    std::optional<int> steps;
    bool no_noise = false;
    bool wall_time = false;
    bool desk_scale = false;
};

void add_common(CLI::App *cmd, Common &c)
{
    cmd->add_option("--config", c.config, "Scenario INI file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Master seed");
    cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
    cmd->add_option("--episodes", c.episodes, "Number of episodes (coherence blocks)")->check(CLI::PositiveNumber);
    cmd->add_option("--steps", c.steps, "Time steps per learning episode")->check(CLI::PositiveNumber);
    cmd->add_flag("--no-noise", c.no_noise, "Disable receiver noise");
    cmd->add_flag("--wall-time", c.wall_time, "Add a wall_time column to record CSVs");
    cmd->add_flag("--desk-scale", c.desk_scale, "Start from M=16, n_r=4, hidden width 128");
}

ScenarioConfig resolve(const Common &c, std::optional<Algorithm> algorithm)
{
    ScenarioConfig cfg;
    if (!c.config.empty())
    {
        cfg = load_config(c.config, algorithm);
    }
    else
    {
        const Algorithm a = algorithm.value_or(Algorithm::arise);
        cfg = c.desk_scale ? ScenarioConfig::desk_scale(a) : ScenarioConfig::defaults(a);
    }
    if (!c.config.empty() && c.desk_scale)
        throw ConfigError("--desk-scale cannot be combined with --config");
    if (c.seed)
        cfg.seed = *c.seed;
    if (c.episodes)
        cfg.episodes = *c.episodes;
    if (c.steps)
        cfg.steps = *c.steps;
    if (c.no_noise)
        cfg.noise = false;
    cfg.validate();
    return cfg;
}

fs::path prepare(const Common &c, const ScenarioConfig &cfg)
{
    const fs::path dir(c.out);
    fs::create_directories(dir);
    std::ofstream(dir / "config.ini") << render_config(cfg);
    return dir;
}

void report(const std::vector<RunRecord> &records, const fs::path &file)
{
    const auto tails = tail_eta_norm(records, 1);
    double sum = 0.0;
    for (const auto &t : tails)
        sum += t.back();
    std::printf("%zu records, %zu episodes, mean final eta_n %.6f -> %s\n", records.size(), tails.size(),
                tails.empty() ? 0.0 : sum / static_cast<double>(tails.size()), file.string().c_str());
}

void run_and_emit(const Common &c, const ScenarioConfig &cfg, const std::string &checkpoint = {})
{
    const fs::path dir = prepare(c, cfg);
    const auto records = run_scenario(cfg, checkpoint.empty() ? fs::path{} : fs::path(checkpoint));
    const fs::path file = dir / "records.csv";
    emit_csv(records, file, {.include_wall_time = c.wall_time});

    std::vector<double> finals;
    for (const auto &t : tail_eta_norm(records, 1))
        finals.push_back(t.back());
    emit_cdf_csv(empirical_cdf(finals), dir / "final_cdf.csv");
    report(records, file);
}

std::vector<std::string> split(const std::string &text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"riseq: RIS channel equalization simulator"};
    app.require_subcommand(1);

    Common common;

    auto *simulate = app.add_subcommand("simulate", "Run one scenario with the configured algorithm");
    add_common(simulate, common);
    std::string algorithm_name;
    simulate->add_option("--algorithm", algorithm_name,
                         "arise, random-phases, inverse-phases, ddpg, td3 or sac (default: from config, else arise)");

    auto *arise = app.add_subcommand("arise", "Run the ARISE equalizer on every episode");
    add_common(arise, common);
    std::optional<double> scale_factor;
    arise->add_option("--scale-factor", scale_factor, "alpha_s")->check(CLI::PositiveNumber);

    auto *train = app.add_subcommand("train", "Train a DRL agent");
    add_common(train, common);
    std::string agent_name;
    train->add_option("--agent", agent_name, "ddpg, td3 or sac")
        ->required()
        ->check(CLI::IsMember({"ddpg", "td3", "sac"}));
    std::string checkpoint;
    train->add_option("--checkpoint", checkpoint, "Write the final agent state here");

    auto *baseline = app.add_subcommand("baseline", "Evaluate a fixed-phase baseline");
    add_common(baseline, common);
    std::string baseline_name;
    baseline->add_option("kind", baseline_name, "random or inverse")
        ->required()
        ->check(CLI::IsMember({"random", "inverse"}));

    auto *sweep_cmd = app.add_subcommand("sweep", "Sweep one scenario parameter");
    add_common(sweep_cmd, common);
    std::string axis_name;
    std::string values_text;
    std::string algorithms_text = "arise,inverse-phases,random-phases";
    sweep_cmd->add_option("--axis", axis_name, "n_r, M or kappa")->required();
    sweep_cmd->add_option("--values", values_text, "Comma-separated values")->required();
    sweep_cmd->add_option("--algorithms", algorithms_text, "Comma-separated algorithms")->capture_default_str();

    auto *constellation = app.add_subcommand("constellation", "QPSK constellation of the first coherence block");
    add_common(constellation, common);
    std::string phases = "arise";
    int symbols = 2000;
    constellation->add_option("--phases", phases, "arise, inverse, random or ones")
        ->check(CLI::IsMember({"arise", "inverse", "random", "ones"}))
        ->capture_default_str();
    constellation->add_option("--symbols", symbols, "Transmitted symbols")->check(CLI::PositiveNumber);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit(e);
    }

    try
    {
        if (*simulate)
        {
            std::optional<Algorithm> a;
            if (!algorithm_name.empty())
                a = parse_algorithm(algorithm_name);
            run_and_emit(common, resolve(common, a));
        }
        else if (*arise)
        {
            ScenarioConfig cfg = resolve(common, Algorithm::arise);
            if (scale_factor)
                cfg.arise.scale_factor = *scale_factor;
            run_and_emit(common, cfg);
        }
        else if (*train)
        {
            run_and_emit(common, resolve(common, parse_algorithm(agent_name)), checkpoint);
        }
        else if (*baseline)
        {
            run_and_emit(common, resolve(common, parse_algorithm(baseline_name)));
        }
        else if (*sweep_cmd)
        {
            const ScenarioConfig cfg = resolve(common, std::nullopt);
            const SweepAxis axis = parse_sweep_axis(axis_name);
            std::vector<double> values;
            for (const std::string &v : split(values_text))
            {
                std::size_t used = 0;
                values.push_back(std::stod(v, &used));
                if (used != v.size())
                    throw ConfigError("--values: cannot parse '" + v + "'");
            }
            std::vector<Algorithm> algorithms;
            for (const std::string &a : split(algorithms_text))
                algorithms.push_back(parse_algorithm(a));
            const fs::path dir = prepare(common, cfg);
            const auto rows = sweep(cfg, axis, values, algorithms);
            emit_sweep_csv(rows, dir / "sweep.csv");
            for (const SweepRow &r : rows)
                std::printf("%s=%g %-15s mean %.6f std %.6f\n", std::string(to_string(r.axis)).c_str(), r.value,
                            std::string(to_string(r.algorithm)).c_str(), r.mean, r.std);
        }
        else if (*constellation)
        {
            const ScenarioConfig cfg = resolve(common, std::nullopt);
            const ChannelRealization channel = scenario_channel(cfg);
            CVector gamma = CVector::Ones(channel.elements());
            if (phases == "arise")
                gamma = arise_run(channel, cfg.arise).gamma;
            else if (phases == "inverse")
                gamma = baseline_inverse(channel.cascaded);
            else if (phases == "random")
            {
                Rng rng = Rng::stream(cfg.seed, "baseline", 0);
                gamma = baseline_random(rng, channel.elements());
            }
            const fs::path dir = prepare(common, cfg);
            const fs::path file = dir / "constellation.csv";
            emit_constellation(cfg, gamma, symbols, file);
            const CVector y = received_pulse(channel, gamma).samples;
            std::printf("eta_n %.6f, sinr %.3f dB -> %s\n", compute_eta_norm(y), sinr_db(y, cfg.noise_power()),
                        file.string().c_str());
        }
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "riseq: %s\n", e.what());
        return 1;
    }
    return 0;
}
