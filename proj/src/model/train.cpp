// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/model/train.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "wordcraft/model/codec.hpp"

namespace wordcraft::model {

template <class Scalar>
std::vector<Scalar> interpolate(const std::vector<Scalar>& x0, const std::vector<Scalar>& x1, Scalar t) {
    if (x0.size() != x1.size()) throw ModelError(ModelErrc::ShapeMismatch, "x0 and x1 differ in size");
    std::vector<Scalar> out(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = (Scalar(1) - t) * x0[i] + t * x1[i];
    return out;
}

template <class Scalar>
Scalar flow_matching_loss(const Denoiser<Scalar>& model, const std::vector<FlowItem<Scalar>>& batch,
                          std::vector<Scalar>* grad) {
    if (batch.empty()) return Scalar(0);
    const DenoiserConfig& c = model.config();
    const Eigen::Index cells = c.cells(), width = c.image_patch_dim();
    const Scalar norm = Scalar(1) / static_cast<Scalar>(batch.size() * static_cast<std::size_t>(cells * width));
    Scalar total = 0;
    ForwardCache<Scalar> cache;
    for (const FlowItem<Scalar>& item : batch) {
        const std::vector<Scalar> xt = interpolate(item.x0, item.x1, item.t);
        DenoiserInput<Scalar> in;
        in.x = xt;
        in.t = item.t;
        in.base = item.base;
        in.depth = item.depth;
        const Matrix<Scalar> v = model.forward(in, nullptr, grad ? &cache : nullptr);
        Matrix<Scalar> diff(cells, width);
        for (Eigen::Index r = 0; r < cells; ++r) {
            for (Eigen::Index col = 0; col < width; ++col) {
                const std::size_t i = static_cast<std::size_t>(r * width + col);
                diff(r, col) = v(r, col) - (item.x1[i] - item.x0[i]);
            }
        }
        total += diff.squaredNorm() * norm;
        if (grad) model.backward(cache, (Scalar(2) * norm) * diff, *grad);
    }
    return total;
}

template <class Scalar>
std::vector<Scalar> depth_tokens(const glyph::DepthMap& depth, int patch) {
    if (depth.width != depth.height) throw ModelError(ModelErrc::ShapeMismatch, "depth map must be square");
    std::vector<Scalar> hw(depth.values.begin(), depth.values.end());
    return patchify(hw, depth.width, patch, 1);
}

FlowItem<float> make_flow_item(const TrainingExample& example, const DenoiserConfig& config, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> normal(0.0f, 1.0f);
    std::uniform_real_distribution<float> uniform(0.0f, 1.0f);
    FlowItem<float> item;
    item.x0 = patchify(to_latent(example.image), config.image_size, config.patch, 3);
    item.x1.resize(item.x0.size());
    for (float& v : item.x1) v = normal(rng);
    item.t = uniform(rng);
    item.base = StyleVocabulary::ids(example.tokens);
    item.depth = depth_tokens<float>(example.depth, config.patch);
    return item;
}

TrainResult train(Denoiser<float>& model, const std::vector<TrainingExample>& data, const TrainConfig& cfg) {
    if (data.empty()) throw ModelError(ModelErrc::InvalidConfig, "training set is empty");
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    TrainResult result;
    std::vector<float>& params = model.parameters();
    const std::size_t n = params.size();
    std::vector<double> m(n, 0.0), v(n, 0.0);
    std::vector<float> grad(n, 0.0f);
    std::mt19937_64 order(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
    double interval_sum = 0;
    int interval_count = 0;

    for (int step = 0; step < cfg.steps; ++step) {
        if (cfg.time_limit_seconds > 0 &&
            std::chrono::duration<double>(Clock::now() - start).count() > cfg.time_limit_seconds) {
            break;
        }
        std::vector<FlowItem<float>> batch;
        for (int b = 0; b < cfg.batch; ++b) {
            const std::size_t idx = pick(order);
            batch.push_back(make_flow_item(data[idx], model.config(), order()));
        }
        std::fill(grad.begin(), grad.end(), 0.0f);
        const double loss = flow_matching_loss(model, batch, &grad);
        if (!std::isfinite(loss)) {
            throw ModelError(ModelErrc::DivergenceDetected, "loss is " + std::to_string(loss) + " at step " + std::to_string(step));
        }
        if (step == 0) result.initial_loss = loss;

        double norm2 = 0;
        for (float g : grad) norm2 += static_cast<double>(g) * g;
        const double clip = (cfg.grad_clip > 0 && std::sqrt(norm2) > cfg.grad_clip) ? cfg.grad_clip / std::sqrt(norm2) : 1.0;

        const double warm = cfg.warmup > 0 ? std::min(1.0, (step + 1.0) / cfg.warmup) : 1.0;
        const double progress = static_cast<double>(step) / std::max(1, cfg.steps - 1);
        const double decay = 0.1 + 0.9 * 0.5 * (1.0 + std::cos(3.141592653589793 * progress));
        const double lr = cfg.lr * warm * decay;
        const double bc1 = 1.0 - std::pow(cfg.beta1, step + 1), bc2 = 1.0 - std::pow(cfg.beta2, step + 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double g = grad[i] * clip;
            m[i] = cfg.beta1 * m[i] + (1 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1 - cfg.beta2) * g * g;
            const double update = (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.eps) + cfg.weight_decay * params[i];
            params[i] = static_cast<float>(params[i] - lr * update);
        }

        interval_sum += loss;
        ++interval_count;
        result.steps_run = step + 1;
        result.final_loss = loss;
        if (cfg.log_every > 0 && (step + 1) % cfg.log_every == 0) {
            const double mean = interval_sum / interval_count;
            result.loss_curve.push_back(mean);
            if (cfg.on_log) cfg.on_log(step + 1, mean);
            interval_sum = 0;
            interval_count = 0;
        }
    }
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

template std::vector<float> interpolate(const std::vector<float>&, const std::vector<float>&, float);
template std::vector<double> interpolate(const std::vector<double>&, const std::vector<double>&, double);
template float flow_matching_loss(const Denoiser<float>&, const std::vector<FlowItem<float>>&, std::vector<float>*);
template double flow_matching_loss(const Denoiser<double>&, const std::vector<FlowItem<double>>&, std::vector<double>*);
template std::vector<float> depth_tokens(const glyph::DepthMap&, int);
template std::vector<double> depth_tokens(const glyph::DepthMap&, int);

}  // namespace wordcraft::model
