// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wordcraft/model/dataset.hpp"
#include "wordcraft/model/denoiser.hpp"

namespace wordcraft::model {

/// One flow-matching sample in token layout: data x0, noise x1, time t.
template <class Scalar>
struct FlowItem {
    std::vector<Scalar> x0;     // [cells][patch*patch*3]
    std::vector<Scalar> x1;     // same shape, standard normal
    Scalar t = 0;
    std::vector<int> base;      // prompt token ids
    std::vector<Scalar> depth;  // [cells][patch*patch]
};

/// x_t = (1 - t) x0 + t x1
template <class Scalar>
std::vector<Scalar> interpolate(const std::vector<Scalar>& x0, const std::vector<Scalar>& x1, Scalar t);

/// Mean over elements and items of (v_hat - (x1 - x0))^2. If `grad` is
/// non-null, the parameter gradient is accumulated into it.
template <class Scalar>
Scalar flow_matching_loss(const Denoiser<Scalar>& model, const std::vector<FlowItem<Scalar>>& batch,
                          std::vector<Scalar>* grad = nullptr);

/// Patchified depth in [cells][patch*patch] layout.
template <class Scalar>
std::vector<Scalar> depth_tokens(const glyph::DepthMap& depth, int patch);

/// Builds a FlowItem from a training example, drawing x1 and t from `rng`.
FlowItem<float> make_flow_item(const TrainingExample& example, const DenoiserConfig& config, std::uint64_t seed);

struct TrainConfig {
    int steps = 3000;
    int batch = 16;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
    int warmup = 100;
    double grad_clip = 1.0;
    std::uint64_t seed = 7;
    /// Stop early once this many seconds have elapsed (0 = no limit).
    double time_limit_seconds = 0;
    /// Called every `log_every` steps with (step, mean loss since last call).
    int log_every = 50;
    std::function<void(int, double)> on_log;
};

struct TrainResult {
    int steps_run = 0;
    double seconds = 0;
    std::vector<double> loss_curve;  // one entry per log interval
    double initial_loss = 0;
    double final_loss = 0;
};

/// Adam on the flow-matching loss with dense attention. Batches are drawn from
/// `data` in an order fixed by `config.seed`. Throws DivergenceDetected on a
/// non-finite loss.
TrainResult train(Denoiser<float>& model, const std::vector<TrainingExample>& data, const TrainConfig& config);

}  // namespace wordcraft::model
