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

#include "riseq/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace riseq
{

enum class OutputActivation
{
    linear,
    tanh,
};

struct MlpSpec
{
    std::vector<int> sizes;  // input, hidden..., output
    bool layer_norm = false; // after the affine map of every hidden layer, before ReLU
    OutputActivation output = OutputActivation::linear;

    friend bool operator==(const MlpSpec &, const MlpSpec &) = default;
};

inline constexpr double kLayerNormEpsilon = 1e-5;

// Fully connected network with ReLU hidden layers. All parameters live in one flat vector so
// optimizers, target tracking and snapshots operate elementwise. Batches are column-major: one
// sample per column.
//
// Flat layout, per layer in order: weight (out x in, column-major), bias (out), and for hidden
// layers with layer norm: gain (out), offset (out).
class Mlp
{
public:
    struct Cache
    {
        std::uint64_t version = 0;
        std::vector<Eigen::MatrixXd> inputs;   // input to each layer
        std::vector<Eigen::MatrixXd> pre;      // pre-activation of each layer (after norm if any)
        std::vector<Eigen::MatrixXd> normed;   // x-hat of normalized layers
        std::vector<Eigen::RowVectorXd> inv_std;
        Eigen::MatrixXd output;
    };

    struct Gradients
    {
        Eigen::VectorXd params;
        Eigen::MatrixXd input;
    };

    Mlp() = default;

    // Weights ~ N(0, init_std^2), biases 0, norm gains 1, norm offsets 0.
    Mlp(MlpSpec spec, Rng &rng, double init_std = 0.1);

    Eigen::MatrixXd forward(const Eigen::MatrixXd &x, Cache *cache = nullptr) const;
    Eigen::VectorXd forward_one(const Eigen::VectorXd &x) const;

    // Reverse-mode pass for the loss whose gradient w.r.t. the output is grad_output.
    // Throws std::logic_error if the parameters changed since `cache` was filled.
    Gradients backward(const Cache &cache, const Eigen::MatrixXd &grad_output) const;

    const Eigen::VectorXd &parameters() const { return params_; }
    Eigen::VectorXd &mutable_parameters();
    void set_parameters(const Eigen::VectorXd &params);

    const MlpSpec &spec() const { return spec_; }
    int num_layers() const { return static_cast<int>(layers_.size()); }
    int input_size() const { return spec_.sizes.front(); }
    int output_size() const { return spec_.sizes.back(); }
    Eigen::Index size() const { return params_.size(); }

    Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
    Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
    Eigen::Map<const Eigen::VectorXd> norm_gain(int layer) const;
    Eigen::Map<const Eigen::VectorXd> norm_offset(int layer) const;

    // Text snapshot: header "riseq-mlp 1", sizes, layer_norm flag, output activation, parameter
    // count, then one %.17g value per line in flat order.
    void save(std::ostream &out) const;
    static Mlp load(std::istream &in);

private:
    struct Layer
    {
        int in = 0;
        int out = 0;
        bool norm = false;
        Eigen::Index weight = 0;
        Eigen::Index bias = 0;
        Eigen::Index gain = 0;
        Eigen::Index offset = 0;
    };

    void build_layout();
    void touch();

    MlpSpec spec_;
    std::vector<Layer> layers_;
    Eigen::VectorXd params_;
    std::uint64_t version_ = 0;
};

struct AdamConfig
{
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Bias-corrected adaptive-moment optimizer over a flat parameter vector.
class Adam
{
public:
    Adam() = default;
    Adam(Eigen::Index size, AdamConfig config);

    void step(Eigen::VectorXd &params, const Eigen::VectorXd &grad);
    void step(Mlp &net, const Eigen::VectorXd &grad) { step(net.mutable_parameters(), grad); }
    void reset();

    double learning_rate() const { return config_.learning_rate; }
    void set_learning_rate(double lr) { config_.learning_rate = lr; }
    long steps() const { return steps_; }
    const AdamConfig &config() const { return config_; }

private:
    AdamConfig config_;
    Eigen::VectorXd m_;
    Eigen::VectorXd v_;
    long steps_ = 0;
};

// target <- tau * online + (1 - tau) * target
void polyak_update(Mlp &target, const Mlp &online, double tau);

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kSquashEpsilon = 1e-6;

// Diagonal Gaussian policy head. The raw network output stacks [mean; log_std] per column.
struct PolicyHead
{
    Eigen::MatrixXd mean;
    Eigen::MatrixXd log_std;       // clamped to [kLogStdMin, kLogStdMax]
    Eigen::MatrixXd log_std_raw;   // before clamping, for the gradient mask
};

PolicyHead split_policy_head(const Eigen::MatrixXd &raw);

struct PolicySample
{
    Eigen::MatrixXd noise;     // xi ~ N(0, I)
    Eigen::MatrixXd pre_tanh;  // u = mean + exp(log_std) * xi
    Eigen::MatrixXd action;    // tanh(u)
    Eigen::RowVectorXd log_prob;
};

// log_prob = log N(u; mean, diag(exp(2 log_std))) - sum log(1 - tanh(u)^2 + kSquashEpsilon).
PolicySample gaussian_policy_sample(const PolicyHead &head, Rng &rng);
PolicySample gaussian_policy_evaluate(const PolicyHead &head, const Eigen::MatrixXd &noise);

// Gradient w.r.t. the raw head output (reparameterized, noise held fixed) given the loss
// gradients w.r.t. the squashed action and the log-probability of each column.
Eigen::MatrixXd gaussian_policy_backward(const PolicyHead &head, const PolicySample &sample,
                                         const Eigen::MatrixXd &grad_action, const Eigen::RowVectorXd &grad_log_prob);

} // namespace riseq
