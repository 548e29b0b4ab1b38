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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace riseq
{

namespace
{

std::string real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_for_write(const std::filesystem::path &path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream &out, const std::filesystem::path &path)
{
    out.flush();
    if (!out)
        throw std::runtime_error("write to '" + path.string() + "' failed");
}

} // namespace

ChannelRealization scenario_channel(const ScenarioConfig &cfg)
{
    cfg.validate();
    Rng rng = Rng::stream(cfg.seed, "channel", 0);
    return ChannelSampler(cfg.geometry, cfg.fading).sample(rng, cfg.geometry.ue);
}

std::vector<RunRecord> run_scenario(const ScenarioConfig &cfg)
{
    return run_scenario(cfg, {});
}

std::vector<RunRecord> run_scenario(const ScenarioConfig &cfg, const std::filesystem::path &checkpoint)
{
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const ChannelSampler sampler(cfg.geometry, cfg.fading);
    const double noise_power = cfg.noise_power();
    const int elements = cfg.geometry.elements;

    std::unique_ptr<Agent> agent;
    if (is_agent(cfg.algorithm))
    {
        Rng init = Rng::stream(cfg.seed, "init", 0);
        agent = make_agent(agent_kind(cfg.algorithm), 2 * cfg.fading.taps(), 2 * elements, cfg.agent, init);
    }

    std::vector<RunRecord> records;
    Rng walk = Rng::stream(cfg.seed, "walk");
    Vec2 ue = cfg.geometry.ue;
    for (int e = 0; e < cfg.episodes; ++e)
    {
        if (e > 0)
            ue = random_walk_step(walk, ue, cfg.walk);
        Rng channel_rng = Rng::stream(cfg.seed, "channel", static_cast<std::uint64_t>(e));
        const ChannelRealization channel = sampler.sample(channel_rng, ue);

        auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
        Rng noise_rng = Rng::stream(cfg.seed, "noise", static_cast<std::uint64_t>(e));
        auto emit = [&](int step, const CVector &clean) {
            CVector y = clean;
            if (noise_power > 0.0)
                for (Eigen::Index k = 0; k < y.size(); ++k)
                    y(k) += noise_rng.complex_normal(noise_power);
            records.push_back({e, step, cfg.algorithm, compute_eta(y), compute_eta_norm(y),
                               sinr_db(clean, noise_power), elapsed()});
        };

        switch (cfg.algorithm)
        {
        case Algorithm::arise: {
            AriseSolver solver(channel, cfg.arise, arise_initial_gamma(channel, cfg.arise.start));
            emit(0, solver.pulse());
            for (int i = 0; i < cfg.arise.max_iters; ++i)
            {
                const bool done = solver.step();
                emit(i + 1, solver.pulse());
                if (done)
                    break;
            }
            break;
        }
        case Algorithm::random_phases: {
            Rng rng = Rng::stream(cfg.seed, "baseline", static_cast<std::uint64_t>(e));
            emit(0, received_pulse(channel, baseline_random(rng, elements)).samples);
            break;
        }
        case Algorithm::inverse_phases:
            emit(0, received_pulse(channel, baseline_inverse(channel.cascaded)).samples);
            break;
        case Algorithm::ddpg:
        case Algorithm::td3:
        case Algorithm::sac: {
            RisEnvironment env(channel, noise_power, noise_rng);
            Rng policy = Rng::stream(cfg.seed, "policy", static_cast<std::uint64_t>(e));
            Rng init = Rng::stream(cfg.seed, "init", static_cast<std::uint64_t>(e) + 1);
            const EpisodeTrace trace = run_episode(*agent, env, cfg.episode_config(), policy, init);
            const double t = elapsed();
            for (const EpisodeStep &s : trace.steps)
                records.push_back({e, s.step, cfg.algorithm, s.eta, s.eta_norm, s.sinr_db, t});
            break;
        }
        }
    }
    if (agent && !checkpoint.empty())
    {
        std::ofstream out = open_for_write(checkpoint);
        agent->save(out);
        finish(out, checkpoint);
    }
    return records;
}

std::vector<std::vector<double>> tail_eta_norm(const std::vector<RunRecord> &records, int count)
{
    std::map<int, std::vector<double>> by_episode;
    for (const RunRecord &r : records)
        by_episode[r.episode].push_back(r.eta_norm);
    std::vector<std::vector<double>> out;
    for (auto &[episode, values] : by_episode)
    {
        const std::size_t n = std::min(values.size(), static_cast<std::size_t>(std::max(count, 0)));
        out.emplace_back(values.end() - static_cast<std::ptrdiff_t>(n), values.end());
    }
    return out;
}

std::string_view to_string(SweepAxis axis)
{
    switch (axis)
    {
    case SweepAxis::delayed_paths:
        return "n_r";
    case SweepAxis::elements:
        return "M";
    case SweepAxis::kappa:
        return "kappa";
    }
    return "?";
}

SweepAxis parse_sweep_axis(std::string_view name)
{
    if (name == "n_r" || name == "nr" || name == "delayed_paths")
        return SweepAxis::delayed_paths;
    if (name == "M" || name == "m" || name == "elements")
        return SweepAxis::elements;
    if (name == "kappa")
        return SweepAxis::kappa;
    throw ConfigError("unknown sweep axis '" + std::string(name) + "' (expected n_r, M or kappa)");
}

ScenarioConfig with_axis_value(ScenarioConfig cfg, SweepAxis axis, double value)
{
    auto whole = [&](const char *what) {
        if (value != std::floor(value))
            throw ConfigError(std::string("sweep: ") + what + " values must be integers");
        return static_cast<int>(value);
    };
    switch (axis)
    {
    case SweepAxis::delayed_paths:
        cfg.fading.delayed_paths = whole("n_r");
        break;
    case SweepAxis::elements:
        cfg.geometry.elements = whole("M");
        break;
    case SweepAxis::kappa:
        cfg.fading.kappa = value;
        break;
    }
    return cfg;
}

std::vector<SweepRow> sweep(const ScenarioConfig &cfg, SweepAxis axis, const std::vector<double> &values,
                            const std::vector<Algorithm> &algorithms)
{
    if (values.empty())
        throw ConfigError("sweep: no values given");
    if (algorithms.empty())
        throw ConfigError("sweep: no algorithms given");
    std::vector<SweepRow> rows;
    for (double v : values)
    {
        for (Algorithm a : algorithms)
        {
            ScenarioConfig c = with_axis_value(cfg, axis, v);
            if (a != c.algorithm)
            {
                const ScenarioConfig fresh = ScenarioConfig::defaults(a);
                c.algorithm = a;
                if (is_agent(a))
                {
                    c.agent.layer_norm = fresh.agent.layer_norm;
                    c.agent.actor_lr = fresh.agent.actor_lr;
                }
            }
            std::vector<double> means;
            for (const auto &tail : tail_eta_norm(run_scenario(c), kSweepTail))
            {
                double s = 0.0;
                for (double x : tail)
                    s += x;
                means.push_back(s / static_cast<double>(tail.size()));
            }
            SweepRow row;
            row.axis = axis;
            row.value = v;
            row.algorithm = a;
            row.episodes = static_cast<int>(means.size());
            for (double m : means)
                row.mean += m;
            row.mean /= static_cast<double>(means.size());
            if (means.size() > 1)
            {
                double ss = 0.0;
                for (double m : means)
                    ss += (m - row.mean) * (m - row.mean);
                row.std = std::sqrt(ss / static_cast<double>(means.size() - 1));
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values)
{
    if (values.empty())
        throw std::invalid_argument("empirical_cdf: empty input");
    for (double v : values)
        if (std::isnan(v))
            throw std::invalid_argument("empirical_cdf: NaN in input");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    std::vector<std::pair<double, double>> cdf;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i + 1 < values.size() && values[i + 1] == values[i])
            continue;
        cdf.emplace_back(values[i], static_cast<double>(i + 1) / n);
    }
    return cdf;
}

void emit_csv(const std::vector<RunRecord> &records, const std::filesystem::path &path, CsvOptions options)
{
    std::ofstream out = open_for_write(path);
    out << "episode,step,algorithm,eta,eta_norm,sinr_db" << (options.include_wall_time ? ",wall_time" : "") << '\n';
    for (const RunRecord &r : records)
    {
        out << r.episode << ',' << r.step << ',' << to_string(r.algorithm) << ',' << real(r.eta) << ','
            << real(r.eta_norm) << ',' << real(r.sinr_db);
        if (options.include_wall_time)
            out << ',' << real(r.wall_time);
        out << '\n';
    }
    finish(out, path);
}

std::vector<RunRecord> read_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("'" + path.string() + "': missing header");
    const bool timed = line.find(",wall_time") != std::string::npos;
    std::vector<RunRecord> records;
    int line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (cells.size() != (timed ? 7u : 6u))
            throw std::runtime_error("'" + path.string() + "' line " + std::to_string(line_no) +
                                     ": wrong field count");
        RunRecord r;
        try
        {
            r.episode = std::stoi(cells[0]);
            r.step = std::stoi(cells[1]);
            r.algorithm = parse_algorithm(cells[2]);
            r.eta = std::stod(cells[3]);
            r.eta_norm = std::stod(cells[4]);
            r.sinr_db = std::stod(cells[5]);
            if (timed)
                r.wall_time = std::stod(cells[6]);
        }
        catch (const std::exception &e)
        {
            throw std::runtime_error("'" + path.string() + "' line " + std::to_string(line_no) + ": " + e.what());
        }
        records.push_back(r);
    }
    return records;
}

void emit_sweep_csv(const std::vector<SweepRow> &rows, const std::filesystem::path &path)
{
    std::ofstream out = open_for_write(path);
    out << "axis,value,algorithm,mean_eta_norm,std_eta_norm,episodes\n";
    for (const SweepRow &r : rows)
        out << to_string(r.axis) << ',' << real(r.value) << ',' << to_string(r.algorithm) << ',' << real(r.mean)
            << ',' << real(r.std) << ',' << r.episodes << '\n';
    finish(out, path);
}

void emit_cdf_csv(const std::vector<std::pair<double, double>> &cdf, const std::filesystem::path &path)
{
    std::ofstream out = open_for_write(path);
    out << "value,probability\n";
    for (const auto &[v, p] : cdf)
        out << real(v) << ',' << real(p) << '\n';
    finish(out, path);
}

void emit_constellation(const ScenarioConfig &cfg, const CVector &gamma, int n_symbols,
                        const std::filesystem::path &path)
{
    const ChannelRealization channel = scenario_channel(cfg);
    if (gamma.size() != channel.elements())
        throw DimensionError("emit_constellation: gamma has " + std::to_string(gamma.size()) + " entries, the RIS " +
                             std::to_string(channel.elements()));
    const CVector y = received_pulse(channel, normalize_gamma(gamma)).samples;
    const double noise_power = cfg.noise_power();
    Rng rng = Rng::stream(cfg.seed, "constellation");
    const Constellation c = qpsk_constellation(y, n_symbols, noise_power, rng);

    std::ofstream out = open_for_write(path);
    const bool ideal = y.tail(y.size() - 1).squaredNorm() + noise_power == 0.0;
    out << "# sinr_db=" << (ideal ? std::string("inf") : real(sinr_db(y, noise_power))) << '\n'
        << "re,im,tx_re,tx_im\n";
    for (std::size_t i = 0; i < c.received.size(); ++i)
        out << real(c.received[i].real()) << ',' << real(c.received[i].imag()) << ','
            << real(c.transmitted[i].real()) << ',' << real(c.transmitted[i].imag()) << '\n';
    finish(out, path);
}

} // namespace riseq
