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

#include "riseq/neural.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace riseq
{

namespace
{

std::uint64_t next_version()
{
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
}

} // namespace

Mlp::Mlp(MlpSpec spec, Rng &rng, double init_std) : spec_(std::move(spec))
{
    build_layout();
    params_.setZero();
    for (const Layer &layer : layers_)
    {
        for (Eigen::Index i = 0; i < Eigen::Index(layer.in) * layer.out; ++i)
            params_(layer.weight + i) = rng.normal(0.0, init_std);
        if (layer.norm)
            params_.segment(layer.gain, layer.out).setOnes();
    }
    touch();
}

void Mlp::build_layout()
{
    if (spec_.sizes.size() < 2)
        throw std::invalid_argument("Mlp: need at least input and output sizes");
    for (int s : spec_.sizes)
        if (s < 1)
            throw std::invalid_argument("Mlp: layer sizes must be positive");

    layers_.clear();
    Eigen::Index offset = 0;
    const std::size_t n_layers = spec_.sizes.size() - 1;
    for (std::size_t l = 0; l < n_layers; ++l)
    {
        Layer layer;
        layer.in = spec_.sizes[l];
        layer.out = spec_.sizes[l + 1];
        layer.norm = spec_.layer_norm && l + 1 < n_layers;
        layer.weight = offset;
        offset += Eigen::Index(layer.in) * layer.out;
        layer.bias = offset;
        offset += layer.out;
        if (layer.norm)
        {
            layer.gain = offset;
            offset += layer.out;
            layer.offset = offset;
            offset += layer.out;
        }
        layers_.push_back(layer);
    }
    params_.resize(offset);
}

void Mlp::touch()
{
    version_ = next_version();
}

Eigen::VectorXd &Mlp::mutable_parameters()
{
    touch();
    return params_;
}

void Mlp::set_parameters(const Eigen::VectorXd &params)
{
    if (params.size() != params_.size())
        throw std::invalid_argument("Mlp::set_parameters: size mismatch");
    params_ = params;
    touch();
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int l) const
{
    const Layer &layer = layers_.at(static_cast<std::size_t>(l));
    return {params_.data() + layer.weight, layer.out, layer.in};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(int l) const
{
    const Layer &layer = layers_.at(static_cast<std::size_t>(l));
    return {params_.data() + layer.bias, layer.out};
}

Eigen::Map<const Eigen::VectorXd> Mlp::norm_gain(int l) const
{
    const Layer &layer = layers_.at(static_cast<std::size_t>(l));
    if (!layer.norm)
        throw std::logic_error("Mlp::norm_gain: layer has no normalization");
    return {params_.data() + layer.gain, layer.out};
}

Eigen::Map<const Eigen::VectorXd> Mlp::norm_offset(int l) const
{
    const Layer &layer = layers_.at(static_cast<std::size_t>(l));
    if (!layer.norm)
        throw std::logic_error("Mlp::norm_offset: layer has no normalization");
    return {params_.data() + layer.offset, layer.out};
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd &x, Cache *cache) const
{
    if (x.rows() != input_size())
        throw std::invalid_argument("Mlp::forward: input has " + std::to_string(x.rows()) + " rows, expected " +
                                    std::to_string(input_size()));
    if (cache)
    {
        cache->version = version_;
        cache->inputs.assign(layers_.size(), {});
        cache->pre.assign(layers_.size(), {});
        cache->normed.assign(layers_.size(), {});
        cache->inv_std.assign(layers_.size(), {});
    }

    Eigen::MatrixXd a = x;
    for (std::size_t l = 0; l < layers_.size(); ++l)
    {
        const Layer &layer = layers_[l];
        const int li = static_cast<int>(l);
        if (cache)
            cache->inputs[l] = a;
        Eigen::MatrixXd z = weight(li) * a;
        z.colwise() += bias(li);

        const bool hidden = l + 1 < layers_.size();
        if (layer.norm)
        {
            const double n = layer.out;
            const Eigen::RowVectorXd mean = z.colwise().sum() / n;
            z.rowwise() -= mean;
            const Eigen::RowVectorXd var = z.array().square().colwise().sum() / n;
            const Eigen::RowVectorXd inv_std = (var.array() + kLayerNormEpsilon).rsqrt();
            z.array().rowwise() *= inv_std.array();
            if (cache)
            {
                cache->normed[l] = z;
                cache->inv_std[l] = inv_std;
            }
            z = (z.array().colwise() * norm_gain(li).array()).matrix();
            z.colwise() += norm_offset(li);
        }
        if (cache)
            cache->pre[l] = z;

        if (hidden)
            a = z.cwiseMax(0.0);
        else if (spec_.output == OutputActivation::tanh)
            a = z.array().tanh().matrix();
        else
            a = std::move(z);
    }
    if (cache)
        cache->output = a;
    return a;
}

Eigen::VectorXd Mlp::forward_one(const Eigen::VectorXd &x) const
{
    return forward(Eigen::MatrixXd(x)).col(0);
}

Mlp::Gradients Mlp::backward(const Cache &cache, const Eigen::MatrixXd &grad_output) const
{
    if (cache.version != version_ || cache.inputs.size() != layers_.size())
        throw std::logic_error("Mlp::backward: cache does not belong to the current parameters");
    if (grad_output.rows() != output_size() || grad_output.cols() != cache.output.cols())
        throw std::invalid_argument("Mlp::backward: gradient shape does not match the output");

    Gradients g;
    g.params = Eigen::VectorXd::Zero(params_.size());

    Eigen::MatrixXd grad = grad_output;
    if (spec_.output == OutputActivation::tanh)
        grad.array() *= 1.0 - cache.output.array().square();

    for (std::size_t l = layers_.size(); l-- > 0;)
    {
        const Layer &layer = layers_[l];
        const int li = static_cast<int>(l);
        const bool hidden = l + 1 < layers_.size();
        if (hidden)
            grad.array() *= (cache.pre[l].array() > 0.0).cast<double>();

        if (layer.norm)
        {
            const Eigen::MatrixXd &xhat = cache.normed[l];
            g.params.segment(layer.gain, layer.out) = (grad.array() * xhat.array()).rowwise().sum();
            g.params.segment(layer.offset, layer.out) = grad.rowwise().sum();
            const Eigen::MatrixXd dxhat = (grad.array().colwise() * norm_gain(li).array()).matrix();
            const double n = layer.out;
            const Eigen::RowVectorXd sum_d = dxhat.colwise().sum();
            const Eigen::RowVectorXd sum_dx = (dxhat.array() * xhat.array()).colwise().sum();
            Eigen::MatrixXd dz = n * dxhat;
            dz.rowwise() -= sum_d;
            dz.array() -= xhat.array().rowwise() * sum_dx.array();
            dz.array().rowwise() *= (cache.inv_std[l] / n).array();
            grad = std::move(dz);
        }

        Eigen::Map<Eigen::MatrixXd>(g.params.data() + layer.weight, layer.out, layer.in) =
            grad * cache.inputs[l].transpose();
        g.params.segment(layer.bias, layer.out) = grad.rowwise().sum();
        grad = weight(li).transpose() * grad;
    }
    g.input = std::move(grad);
    return g;
}

void Mlp::save(std::ostream &out) const
{
    out << "riseq-mlp 1\nsizes";
    for (int s : spec_.sizes)
        out << ' ' << s;
    out << "\nlayer_norm " << (spec_.layer_norm ? 1 : 0) << "\noutput "
        << (spec_.output == OutputActivation::tanh ? "tanh" : "linear") << "\ncount " << params_.size() << '\n';
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < params_.size(); ++i)
        out << params_(i) << '\n';
}

Mlp Mlp::load(std::istream &in)
{
    auto expect = [&in](const std::string &word) {
        std::string token;
        if (!(in >> token) || token != word)
            throw std::runtime_error("Mlp::load: expected '" + word + "'");
    };
    expect("riseq-mlp");
    int format = 0;
    in >> format;
    if (format != 1)
        throw std::runtime_error("Mlp::load: unsupported format version");
    expect("sizes");
    Mlp net;
    std::string token;
    while (in >> token && token != "layer_norm")
        net.spec_.sizes.push_back(std::stoi(token));
    if (token != "layer_norm")
        throw std::runtime_error("Mlp::load: expected 'layer_norm'");
    int norm = 0;
    in >> norm;
    net.spec_.layer_norm = norm != 0;
    expect("output");
    in >> token;
    if (token == "tanh")
        net.spec_.output = OutputActivation::tanh;
    else if (token == "linear")
        net.spec_.output = OutputActivation::linear;
    else
        throw std::runtime_error("Mlp::load: unknown output activation '" + token + "'");
    net.build_layout();
    expect("count");
    Eigen::Index count = 0;
    in >> count;
    if (count != net.params_.size())
        throw std::runtime_error("Mlp::load: parameter count does not match the layer sizes");
    for (Eigen::Index i = 0; i < count; ++i)
        if (!(in >> net.params_(i)))
            throw std::runtime_error("Mlp::load: truncated parameter list");
    net.touch();
    return net;
}

Adam::Adam(Eigen::Index size, AdamConfig config)
    : config_(config), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size))
{
}

void Adam::step(Eigen::VectorXd &params, const Eigen::VectorXd &grad)
{
    if (params.size() != m_.size() || grad.size() != m_.size())
        throw std::invalid_argument("Adam::step: size mismatch");
    ++steps_;
    m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * grad;
    v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
    params.array() -= config_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + config_.epsilon);
}

void Adam::reset()
{
    m_.setZero();
    v_.setZero();
    steps_ = 0;
}

void polyak_update(Mlp &target, const Mlp &online, double tau)
{
    if (!(target.spec() == online.spec()))
        throw std::invalid_argument("polyak_update: network shapes differ");
    Eigen::VectorXd &t = target.mutable_parameters();
    t = tau * online.parameters() + (1.0 - tau) * t;
}

PolicyHead split_policy_head(const Eigen::MatrixXd &raw)
{
    if (raw.rows() % 2 != 0)
        throw std::invalid_argument("split_policy_head: head output must stack mean and log-std");
    const Eigen::Index d = raw.rows() / 2;
    PolicyHead head;
    head.mean = raw.topRows(d);
    head.log_std_raw = raw.bottomRows(d);
    head.log_std = head.log_std_raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
    return head;
}

PolicySample gaussian_policy_evaluate(const PolicyHead &head, const Eigen::MatrixXd &noise)
{
    static const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    PolicySample s;
    s.noise = noise;
    s.pre_tanh = head.mean.array() + head.log_std.array().exp() * noise.array();
    // tanh rounds to +-1 beyond |u| ~ 19
    static const double edge = std::nextafter(1.0, 0.0);
    s.action = s.pre_tanh.array().tanh().cwiseMax(-edge).cwiseMin(edge);
    const Eigen::ArrayXXd gauss = -0.5 * noise.array().square() - head.log_std.array() - half_log_2pi;
    const Eigen::ArrayXXd squash = (1.0 - s.action.array().square() + kSquashEpsilon).log();
    s.log_prob = (gauss - squash).colwise().sum();
    return s;
}

PolicySample gaussian_policy_sample(const PolicyHead &head, Rng &rng)
{
    Eigen::MatrixXd noise(head.mean.rows(), head.mean.cols());
    for (Eigen::Index j = 0; j < noise.cols(); ++j)
        for (Eigen::Index i = 0; i < noise.rows(); ++i)
            noise(i, j) = rng.normal();
    return gaussian_policy_evaluate(head, noise);
}

Eigen::MatrixXd gaussian_policy_backward(const PolicyHead &head, const PolicySample &sample,
                                         const Eigen::MatrixXd &grad_action, const Eigen::RowVectorXd &grad_log_prob)
{
    const Eigen::ArrayXXd a = sample.action.array();
    const Eigen::ArrayXXd one_minus_a2 = 1.0 - a.square();
    // d log_prob / d u, through the squashing correction only.
    const Eigen::ArrayXXd dlogp_du = 2.0 * a * one_minus_a2 / (one_minus_a2 + kSquashEpsilon);

    Eigen::ArrayXXd grad_u = grad_action.array() * one_minus_a2;
    grad_u += dlogp_du.rowwise() * grad_log_prob.array();

    const Eigen::ArrayXXd stddev = head.log_std.array().exp();
    Eigen::ArrayXXd grad_log_std = grad_u * stddev * sample.noise.array();
    grad_log_std -= Eigen::ArrayXXd::Ones(grad_u.rows(), grad_u.cols()).rowwise() * grad_log_prob.array();
    const Eigen::ArrayXXd inside =
        ((head.log_std_raw.array() >= kLogStdMin) && (head.log_std_raw.array() <= kLogStdMax)).cast<double>();
    grad_log_std *= inside;

    Eigen::MatrixXd grad_raw(2 * head.mean.rows(), head.mean.cols());
    grad_raw.topRows(head.mean.rows()) = grad_u.matrix();
    grad_raw.bottomRows(head.mean.rows()) = grad_log_std.matrix();
    return grad_raw;
}

} // namespace riseq
