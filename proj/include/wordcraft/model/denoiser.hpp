// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wordcraft/attention/layout.hpp"
#include "wordcraft/attention/mask.hpp"
#include "wordcraft/model/config.hpp"

namespace wordcraft::model {

/// The readout divides by max(t, floor); below the floor the skip path no
/// longer cancels the noise exactly. Samplers with up to 50 steps stay above it.
inline constexpr double kReadoutTimeFloor = 0.02;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One named parameter tensor inside the flat parameter vector.
struct TensorInfo {
    std::string name;
    int rows = 0;
    int cols = 0;
    std::size_t offset = 0;
    std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

/// Names, shapes and offsets of every parameter for `config`.
std::vector<TensorInfo> parameter_layout(const DenoiserConfig& config);
std::size_t parameter_count(const DenoiserConfig& config);

/// Conditioning and state for one forward pass. `x` is the patchified noisy
/// latent [cells][patch*patch*3]; `depth` is [cells][patch*patch].
template <class Scalar>
struct DenoiserInput {
    std::span<const Scalar> x;
    Scalar t = 0;
    std::vector<int> base;
    std::vector<std::vector<int>> regions;
    std::span<const Scalar> depth;
};

template <class Scalar>
struct ForwardCache;

/// Rectified-flow velocity predictor: a stack of adaLN transformer blocks over
/// the token sequence [X; T_b; T_1..T_N; D].
template <class Scalar>
class Denoiser {
public:
    using Mat = Matrix<Scalar>;

    explicit Denoiser(const DenoiserConfig& config);

    const DenoiserConfig& config() const { return config_; }
    const std::vector<TensorInfo>& tensors() const { return layout_; }
    const TensorInfo& tensor(std::string_view name) const;

    std::vector<Scalar>& parameters() { return params_; }
    const std::vector<Scalar>& parameters() const { return params_; }

    /// Training initialization: scaled normal weights, zero biases, zero
    /// modulation and output projection, unit skip. The initial prediction is
    /// x_t / max(t, floor).
    void initialize(std::uint64_t seed);
    /// Every parameter drawn from N(0, scale^2); used by gradient checks.
    void randomize(std::uint64_t seed, Scalar scale);

    attention::TokenLayout layout_for(const DenoiserInput<Scalar>& input) const;

    /// Predicted velocity [cells][patch*patch*3], read out as
    /// (out.skip * x_t + head) / max(t, kReadoutTimeFloor). With `mask` null, attention is
    /// dense over the whole sequence; otherwise only allowed keys are used.
    Mat forward(const DenoiserInput<Scalar>& input, const attention::SparseMask* mask,
                ForwardCache<Scalar>* cache = nullptr) const;

    /// Accumulates d(objective)/d(parameters) into `grad` given d(objective)/d(v).
    void backward(const ForwardCache<Scalar>& cache, const Mat& dv, std::vector<Scalar>& grad) const;

    struct Offsets;

private:
    DenoiserConfig config_;
    std::vector<TensorInfo> layout_;
    std::vector<Scalar> params_;
    Mat position_;  // [cells][dim]
};

template <class Scalar>
struct ForwardCache {
    using Mat = Matrix<Scalar>;
    struct Block {
        Mat h_in, n1, a, qkv, probs, attn, h_mid, n2, f, u, g;
        std::vector<Scalar> rstd1, rstd2;
        Mat mod;  // 1 x 6d
    };
    DenoiserInput<Scalar> input;
    attention::TokenLayout layout;
    const attention::SparseMask* mask = nullptr;
    std::vector<Scalar> time_features;
    Mat z1, a1, c, silu_c;
    std::vector<Block> blocks;
    Mat h_final, n_final, o_final, mod_final, gate;
    std::vector<Scalar> rstd_final;
    Scalar inv_tau = 1;
};

extern template class Denoiser<float>;
extern template class Denoiser<double>;

/// Sinusoidal time features of width `dim`.
template <class Scalar>
std::vector<Scalar> time_features(Scalar t, int dim);

/// Fixed 2D sinusoidal encoding shared by image and depth tokens, [cells][dim].
template <class Scalar>
Matrix<Scalar> position_encoding(int grid, int dim);

}  // namespace wordcraft::model
