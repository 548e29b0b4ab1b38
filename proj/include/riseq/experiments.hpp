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

#include "riseq/scenario_config.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace riseq
{

struct RunRecord
{
    int episode = 0;
    int step = 0; // DRL time step, ARISE iteration (0 = initial surface) or 0 for baselines
    Algorithm algorithm = Algorithm::arise;
    double eta = 0.0;
    double eta_norm = 0.0;
    double sinr_db = 0.0;
    double wall_time = 0.0; // seconds since the scenario started

    friend bool operator==(const RunRecord &, const RunRecord &) = default;
};

// Runs cfg.episodes coherence blocks. Every episode draws fresh channels; from the second episode on
// the UE first takes one random-walk step. eta and eta_norm are measured on the received pulse of
// each applied configuration (with receiver noise unless disabled); sinr_db is analytic. ARISE
// itself optimizes on noiseless pulses. Identical configs give identical records, except for
// wall_time.
//
// Random streams derived from cfg.seed: "channel"/e, "noise"/e, "policy"/e, "baseline"/e,
// "init"/0 for agent construction and "init"/(e+1) for episode resets, and one "walk" stream.
std::vector<RunRecord> run_scenario(const ScenarioConfig &cfg);

// As above; for learning agents the final agent state is written to `checkpoint` when non-empty.
std::vector<RunRecord> run_scenario(const ScenarioConfig &cfg, const std::filesystem::path &checkpoint);

// Records of the last `count` steps of each episode, grouped by episode index.
std::vector<std::vector<double>> tail_eta_norm(const std::vector<RunRecord> &records, int count);

enum class SweepAxis
{
    delayed_paths,
    elements,
    kappa,
};

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

struct SweepRow
{
    SweepAxis axis = SweepAxis::elements;
    double value = 0.0;
    Algorithm algorithm = Algorithm::arise;
    double mean = 0.0; // mean over episodes of the per-episode last-10-step mean eta_n
    double std = 0.0;  // sample standard deviation of those per-episode means (0 for one episode)
    int episodes = 0;
};

inline constexpr int kSweepTail = 10;

ScenarioConfig with_axis_value(ScenarioConfig cfg, SweepAxis axis, double value);

// One row per (value, algorithm), values outermost.
std::vector<SweepRow> sweep(const ScenarioConfig &cfg, SweepAxis axis, const std::vector<double> &values,
                            const std::vector<Algorithm> &algorithms);

// Right-continuous empirical CDF: distinct sorted values with probability (#values <= v) / n.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

struct CsvOptions
{
    bool include_wall_time = false;
};

// Header "episode,step,algorithm,eta,eta_norm,sinr_db[,wall_time]"; reals with 17 significant digits.
void emit_csv(const std::vector<RunRecord> &records, const std::filesystem::path &path, CsvOptions options = {});
std::vector<RunRecord> read_csv(const std::filesystem::path &path);

void emit_sweep_csv(const std::vector<SweepRow> &rows, const std::filesystem::path &path);
void emit_cdf_csv(const std::vector<std::pair<double, double>> &cdf, const std::filesystem::path &path);

// Transmits n_symbols QPSK symbols over the pulse of `gamma` on the scenario's first channel
// realization, with receiver noise unless cfg.noise is false. Writes "re,im,tx_re,tx_im" rows after
// a "# sinr_db=<value>" comment line carrying the analytic SINR ("inf" for an ISI-free noiseless pulse).
void emit_constellation(const ScenarioConfig &cfg, const CVector &gamma, int n_symbols,
                        const std::filesystem::path &path);

// The first coherence block of run_scenario (same channel stream and UE start).
ChannelRealization scenario_channel(const ScenarioConfig &cfg);

} // namespace riseq
