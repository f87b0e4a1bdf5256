// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/model/denoiser.hpp"

#include <cmath>
#include <random>

#include "wordcraft/attention/mma.hpp"
#include "wordcraft/model/vocabulary.hpp"

namespace wordcraft::model {

const char* to_string(ModelErrc code) {
    switch (code) {
        case ModelErrc::ShapeMismatch: return "ShapeMismatch";
        case ModelErrc::DivergenceDetected: return "DivergenceDetected";
        case ModelErrc::BadCheckpoint: return "BadCheckpoint";
        case ModelErrc::InvalidConfig: return "InvalidConfig";
    }
    return "?";
}

void DenoiserConfig::validate() const {
    auto fail = [](const std::string& why) { throw ModelError(ModelErrc::InvalidConfig, why); };
    if (image_size < 1 || patch < 1 || image_size % patch != 0) fail("image size must be a multiple of the patch size");
    if (dim < 2 || heads < 1 || dim % heads != 0) fail("dim must be divisible by heads");
    if (dim % 4 != 0) fail("dim must be a multiple of 4 for the 2D position encoding");
    if (layers < 1 || ffn_mult < 1) fail("layers and ffn_mult must be positive");
    if (time_dim < 2 || time_dim % 2 != 0) fail("time_dim must be even");
}

nlohmann::json DenoiserConfig::to_json() const {
    return {{"image_size", image_size}, {"patch", patch},       {"dim", dim},           {"heads", heads},
            {"layers", layers},         {"ffn_mult", ffn_mult}, {"time_dim", time_dim}, {"seed", seed}};
}

DenoiserConfig DenoiserConfig::from_json(const nlohmann::json& j) {
    DenoiserConfig c;
    c.image_size = j.value("image_size", c.image_size);
    c.patch = j.value("patch", c.patch);
    c.dim = j.value("dim", c.dim);
    c.heads = j.value("heads", c.heads);
    c.layers = j.value("layers", c.layers);
    c.ffn_mult = j.value("ffn_mult", c.ffn_mult);
    c.time_dim = j.value("time_dim", c.time_dim);
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
}

std::vector<TensorInfo> parameter_layout(const DenoiserConfig& c) {
    c.validate();
    std::vector<TensorInfo> out;
    std::size_t at = 0;
    auto add = [&](std::string name, int rows, int cols) {
        out.push_back({std::move(name), rows, cols, at});
        at += out.back().size();
    };
    const int d = c.dim;
    add("embed.table", StyleVocabulary::kSize, d);
    add("image_in.w", c.image_patch_dim(), d);
    add("image_in.b", 1, d);
    add("depth_in.w", c.depth_patch_dim(), d);
    add("depth_in.b", 1, d);
    add("time.w1", c.time_dim, d);
    add("time.b1", 1, d);
    add("time.w2", d, d);
    add("time.b2", 1, d);
    for (int l = 0; l < c.layers; ++l) {
        const std::string p = "block" + std::to_string(l) + ".";
        add(p + "mod.w", d, 6 * d);
        add(p + "mod.b", 1, 6 * d);
        add(p + "qkv.w", d, 3 * d);
        add(p + "qkv.b", 1, 3 * d);
        add(p + "proj.w", d, d);
        add(p + "proj.b", 1, d);
        add(p + "ffn.w1", d, c.ffn_mult * d);
        add(p + "ffn.b1", 1, c.ffn_mult * d);
        add(p + "ffn.w2", c.ffn_mult * d, d);
        add(p + "ffn.b2", 1, d);
    }
    add("final.mod.w", d, 2 * d);
    add("final.mod.b", 1, 2 * d);
    add("out.w", d, c.image_patch_dim());
    add("out.b", 1, c.image_patch_dim());
    add("out.skip", 1, 1);
    add("out.fg.w", d, c.image_patch_dim());
    add("out.fg.b", 1, c.image_patch_dim());
    return out;
}

std::size_t parameter_count(const DenoiserConfig& config) {
    const auto layout = parameter_layout(config);
    return layout.back().offset + layout.back().size();
}

template <class Scalar>
std::vector<Scalar> time_features(Scalar t, int dim) {
    const int half = dim / 2;
    std::vector<Scalar> out(static_cast<std::size_t>(dim));
    for (int k = 0; k < half; ++k) {
        const Scalar freq = std::exp(-std::log(Scalar(10000)) * Scalar(k) / Scalar(half));
        const Scalar arg = t * Scalar(1000) * freq;
        out[k] = std::sin(arg);
        out[k + half] = std::cos(arg);
    }
    return out;
}

template <class Scalar>
Matrix<Scalar> position_encoding(int grid, int dim) {
    Matrix<Scalar> pe(grid * grid, dim);
    const int quarter = dim / 4;
    for (int r = 0; r < grid; ++r) {
        for (int c = 0; c < grid; ++c) {
            const int cell = r * grid + c;
            for (int k = 0; k < quarter; ++k) {
                const Scalar freq = std::pow(Scalar(100), -Scalar(k) / Scalar(quarter));
                pe(cell, 2 * k) = std::sin(Scalar(r) * freq);
                pe(cell, 2 * k + 1) = std::cos(Scalar(r) * freq);
                pe(cell, 2 * quarter + 2 * k) = std::sin(Scalar(c) * freq);
                pe(cell, 2 * quarter + 2 * k + 1) = std::cos(Scalar(c) * freq);
            }
        }
    }
    return pe;
}

namespace {

template <class Scalar>
using Mat = Matrix<Scalar>;
template <class Scalar>
using Row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

template <class Scalar>
Scalar silu(Scalar x) {
    return x / (Scalar(1) + std::exp(-x));
}

template <class Scalar>
Scalar silu_grad(Scalar x) {
    const Scalar s = Scalar(1) / (Scalar(1) + std::exp(-x));
    return s * (Scalar(1) + x * (Scalar(1) - s));
}

template <class Scalar>
constexpr Scalar kGeluC = Scalar(0.7978845608028654);  // sqrt(2/pi)

template <class Scalar>
Scalar gelu(Scalar u) {
    return Scalar(0.5) * u * (Scalar(1) + std::tanh(kGeluC<Scalar> * (u + Scalar(0.044715) * u * u * u)));
}

template <class Scalar>
Scalar gelu_grad(Scalar u) {
    const Scalar th = std::tanh(kGeluC<Scalar> * (u + Scalar(0.044715) * u * u * u));
    return Scalar(0.5) * (Scalar(1) + th) +
           Scalar(0.5) * u * (Scalar(1) - th * th) * kGeluC<Scalar> * (Scalar(1) + Scalar(3 * 0.044715) * u * u);
}

template <class Scalar>
constexpr Scalar kLayerNormEps = Scalar(1e-6);

// Row-wise normalization without affine parameters.
template <class Scalar>
void layer_norm(const Mat<Scalar>& x, Mat<Scalar>& n, std::vector<Scalar>& rstd) {
    n.resize(x.rows(), x.cols());
    rstd.resize(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const Scalar mean = x.row(i).mean();
        const Scalar var = (x.row(i).array() - mean).square().mean();
        const Scalar r = Scalar(1) / std::sqrt(var + kLayerNormEps<Scalar>);
        n.row(i) = (x.row(i).array() - mean) * r;
        rstd[static_cast<std::size_t>(i)] = r;
    }
}

template <class Scalar>
Mat<Scalar> layer_norm_backward(const Mat<Scalar>& n, const std::vector<Scalar>& rstd, const Mat<Scalar>& dn) {
    Mat<Scalar> dx(n.rows(), n.cols());
    for (Eigen::Index i = 0; i < n.rows(); ++i) {
        const Scalar mean_dn = dn.row(i).mean();
        const Scalar mean_dn_n = (dn.row(i).array() * n.row(i).array()).mean();
        dx.row(i) = rstd[static_cast<std::size_t>(i)] * (dn.row(i).array() - mean_dn - n.row(i).array() * mean_dn_n);
    }
    return dx;
}

}  // namespace

template <class Scalar>
struct Denoiser<Scalar>::Offsets {
    struct Block {
        std::size_t mod_w, mod_b, qkv_w, qkv_b, proj_w, proj_b, w1, b1, w2, b2;
    };
    std::size_t table, img_w, img_b, dep_w, dep_b, t_w1, t_b1, t_w2, t_b2;
    std::vector<Block> blocks;
    std::size_t fmod_w, fmod_b, out_w, out_b, out_skip, fg_w, fg_b;

    explicit Offsets(const std::vector<TensorInfo>& layout) {
        std::size_t i = 0;
        auto next = [&] { return layout[i++].offset; };
        table = next();
        img_w = next();
        img_b = next();
        dep_w = next();
        dep_b = next();
        t_w1 = next();
        t_b1 = next();
        t_w2 = next();
        t_b2 = next();
        while (layout[i].name.rfind("block", 0) == 0) {
            Block b;
            b.mod_w = next();
            b.mod_b = next();
            b.qkv_w = next();
            b.qkv_b = next();
            b.proj_w = next();
            b.proj_b = next();
            b.w1 = next();
            b.b1 = next();
            b.w2 = next();
            b.b2 = next();
            blocks.push_back(b);
        }
        fmod_w = next();
        fmod_b = next();
        out_w = next();
        out_b = next();
        out_skip = next();
        fg_w = next();
        fg_b = next();
    }
};

namespace {

template <class Scalar>
using ConstMap = Eigen::Map<const Mat<Scalar>>;
template <class Scalar>
using MutMap = Eigen::Map<Mat<Scalar>>;

}  // namespace

template <class Scalar>
Denoiser<Scalar>::Denoiser(const DenoiserConfig& config)
    : config_(config),
      layout_(parameter_layout(config)),
      params_(parameter_count(config), Scalar(0)),
      position_(position_encoding<Scalar>(config.grid(), config.dim)) {}

template <class Scalar>
const TensorInfo& Denoiser<Scalar>::tensor(std::string_view name) const {
    for (const TensorInfo& t : layout_) {
        if (t.name == name) return t;
    }
    throw ModelError(ModelErrc::ShapeMismatch, "no parameter named " + std::string(name));
}

template <class Scalar>
void Denoiser<Scalar>::initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (const TensorInfo& t : layout_) {
        Scalar* p = params_.data() + t.offset;
        const bool is_bias = t.rows == 1 && t.name != "embed.table";
        const bool zero = is_bias || t.name.find("mod.") != std::string::npos || t.name == "out.w" || t.name == "out.fg.w";
        double std = 0.0;
        if (!zero) std = t.name == "embed.table" ? 1.0 : 1.0 / std::sqrt(static_cast<double>(t.rows));
        for (std::size_t i = 0; i < t.size(); ++i) p[i] = zero ? Scalar(0) : static_cast<Scalar>(std * normal(rng));
    }
    // Identity skip: the untrained model predicts v = x_t / t, i.e. a clean image of zeros.
    params_[tensor("out.skip").offset] = Scalar(1);
}

template <class Scalar>
void Denoiser<Scalar>::randomize(std::uint64_t seed, Scalar scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Scalar& p : params_) p = scale * static_cast<Scalar>(normal(rng));
}

template <class Scalar>
attention::TokenLayout Denoiser<Scalar>::layout_for(const DenoiserInput<Scalar>& input) const {
    std::vector<int> lens;
    for (const auto& r : input.regions) lens.push_back(static_cast<int>(r.size()));
    return attention::make_layout(config_.grid(), config_.grid(), static_cast<int>(input.base.size()), lens);
}

template <class Scalar>
typename Denoiser<Scalar>::Mat Denoiser<Scalar>::forward(const DenoiserInput<Scalar>& input,
                                                         const attention::SparseMask* mask,
                                                         ForwardCache<Scalar>* cache) const {
    const DenoiserConfig& c = config_;
    const int d = c.dim, cells = c.cells(), hd = c.head_dim();
    if (input.x.size() != static_cast<std::size_t>(cells) * c.image_patch_dim() ||
        input.depth.size() != static_cast<std::size_t>(cells) * c.depth_patch_dim()) {
        throw ModelError(ModelErrc::ShapeMismatch, "input latents or depth do not match the configured grid");
    }
    const attention::TokenLayout layout = layout_for(input);
    const int s = layout.size();
    if (mask && mask->size != s) {
        throw ModelError(ModelErrc::ShapeMismatch,
                         "mask covers " + std::to_string(mask->size) + " tokens, sequence has " + std::to_string(s));
    }
    const Offsets o(layout_);
    const Scalar* P = params_.data();
    auto W = [&](std::size_t off, int rows, int cols) { return ConstMap<Scalar>(P + off, rows, cols); };

    ForwardCache<Scalar> local;
    ForwardCache<Scalar>& k = cache ? *cache : local;
    k.input = input;
    k.layout = layout;
    k.mask = mask;

    // Time conditioning.
    k.time_features = time_features<Scalar>(input.t, c.time_dim);
    const ConstMap<Scalar> tf(k.time_features.data(), 1, c.time_dim);
    k.z1 = tf * W(o.t_w1, c.time_dim, d) + W(o.t_b1, 1, d);
    k.a1 = k.z1.unaryExpr([](Scalar v) { return silu(v); });
    k.c = k.a1 * W(o.t_w2, d, d) + W(o.t_b2, 1, d);
    k.silu_c = k.c.unaryExpr([](Scalar v) { return silu(v); });

    // Token embeddings.
    Mat h(s, d);
    const ConstMap<Scalar> x(input.x.data(), cells, c.image_patch_dim());
    const ConstMap<Scalar> dp(input.depth.data(), cells, c.depth_patch_dim());
    h.topRows(cells) = (x * W(o.img_w, c.image_patch_dim(), d)).rowwise() + Row<Scalar>(W(o.img_b, 1, d));
    h.topRows(cells) += position_;
    h.bottomRows(cells) = (dp * W(o.dep_w, c.depth_patch_dim(), d)).rowwise() + Row<Scalar>(W(o.dep_b, 1, d));
    h.bottomRows(cells) += position_;
    int row = cells;
    auto embed = [&](const std::vector<int>& ids) {
        for (int id : ids) {
            const int safe = (id >= 0 && id < StyleVocabulary::kSize) ? id : StyleVocabulary::kUnk;
            h.row(row++) = W(o.table, StyleVocabulary::kSize, d).row(safe);
        }
    };
    embed(input.base);
    for (const auto& r : input.regions) embed(r);

    const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(hd));
    k.blocks.resize(o.blocks.size());
    for (std::size_t l = 0; l < o.blocks.size(); ++l) {
        const auto& b = o.blocks[l];
        auto& kb = k.blocks[l];
        kb.h_in = h;
        kb.mod = k.silu_c * W(b.mod_w, d, 6 * d) + W(b.mod_b, 1, 6 * d);
        const Row<Scalar> shift1 = kb.mod.block(0, 0, 1, d), scale1 = kb.mod.block(0, d, 1, d),
                          gate1 = kb.mod.block(0, 2 * d, 1, d), shift2 = kb.mod.block(0, 3 * d, 1, d),
                          scale2 = kb.mod.block(0, 4 * d, 1, d), gate2 = kb.mod.block(0, 5 * d, 1, d);

        layer_norm(h, kb.n1, kb.rstd1);
        kb.a = (kb.n1.array().rowwise() * (scale1.array() + Scalar(1))).rowwise() + shift1.array();
        kb.qkv = (kb.a * W(b.qkv_w, d, 3 * d)).rowwise() + Row<Scalar>(W(b.qkv_b, 1, 3 * d));

        kb.attn.resize(s, d);
        if (mask) {
            kb.probs.resize(c.heads, mask->nnz());
            for (int head = 0; head < c.heads; ++head) {
                const Scalar* base = kb.qkv.data() + head * hd;
                attention::attend_head(*mask, base, base + d, base + 2 * d, static_cast<std::size_t>(3 * d), hd,
                                       kb.attn.data() + head * hd, static_cast<std::size_t>(d),
                                       kb.probs.data() + static_cast<std::size_t>(head) * mask->nnz());
            }
        } else {
            kb.probs.resize(static_cast<Eigen::Index>(c.heads) * s, s);
            for (int head = 0; head < c.heads; ++head) {
                const auto q = kb.qkv.block(0, head * hd, s, hd);
                const auto kk = kb.qkv.block(0, d + head * hd, s, hd);
                const auto v = kb.qkv.block(0, 2 * d + head * hd, s, hd);
                auto p = kb.probs.block(static_cast<Eigen::Index>(head) * s, 0, s, s);
                p.noalias() = q * kk.transpose();
                p *= scale;
                for (int i = 0; i < s; ++i) {
                    const Scalar m = p.row(i).maxCoeff();
                    p.row(i) = (p.row(i).array() - m).exp();
                    p.row(i) /= p.row(i).sum();
                }
                kb.attn.block(0, head * hd, s, hd).noalias() = p * v;
            }
        }
        h.array() += ((kb.attn * W(b.proj_w, d, d)).rowwise() + Row<Scalar>(W(b.proj_b, 1, d))).array().rowwise() *
                     gate1.array();
        kb.h_mid = h;

        layer_norm(h, kb.n2, kb.rstd2);
        kb.f = (kb.n2.array().rowwise() * (scale2.array() + Scalar(1))).rowwise() + shift2.array();
        const int hidden = c.ffn_mult * d;
        kb.u = (kb.f * W(b.w1, d, hidden)).rowwise() + Row<Scalar>(W(b.b1, 1, hidden));
        kb.g = kb.u.unaryExpr([](Scalar v) { return gelu(v); });
        h.array() += ((kb.g * W(b.w2, hidden, d)).rowwise() + Row<Scalar>(W(b.b2, 1, d))).array().rowwise() *
                     gate2.array();
    }

    // Only image tokens are read out.
    k.h_final = h.topRows(cells);
    k.mod_final = k.silu_c * W(o.fmod_w, d, 2 * d) + W(o.fmod_b, 1, 2 * d);
    const Row<Scalar> fshift = k.mod_final.block(0, 0, 1, d), fscale = k.mod_final.block(0, d, 1, d);
    layer_norm(k.h_final, k.n_final, k.rstd_final);
    k.o_final = (k.n_final.array().rowwise() * (fscale.array() + Scalar(1))).rowwise() + fshift.array();
    Mat v = (k.o_final * W(o.out_w, d, c.image_patch_dim())).rowwise() + Row<Scalar>(W(o.out_b, 1, c.image_patch_dim()));
    // Foreground head, gated per pixel by depth > 0 so glyph edges need not be
    // carried by the token.
    k.gate.resize(cells, c.image_patch_dim());
    for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < c.image_patch_dim(); ++j) k.gate(i, j) = dp(i, j / 3) > Scalar(0) ? Scalar(1) : Scalar(0);
    }
    v.array() += k.gate.array() *
                 ((k.o_final * W(o.fg_w, d, c.image_patch_dim())).rowwise() + Row<Scalar>(W(o.fg_b, 1, c.image_patch_dim())))
                     .array();
    // v = (skip * x_t + head) / max(t, floor): the head only has to carry the
    // clean image, which is low-rank, while the noise passes through the skip.
    k.inv_tau = Scalar(1) / std::max(input.t, static_cast<Scalar>(kReadoutTimeFloor));
    v += P[o.out_skip] * x;
    v *= k.inv_tau;
    return v;
}

template <class Scalar>
void Denoiser<Scalar>::backward(const ForwardCache<Scalar>& k, const Mat& dv, std::vector<Scalar>& grad) const {
    const DenoiserConfig& c = config_;
    const int d = c.dim, cells = c.cells(), hd = c.head_dim(), s = k.layout.size();
    if (grad.size() != params_.size()) grad.assign(params_.size(), Scalar(0));
    if (dv.rows() != cells || dv.cols() != c.image_patch_dim()) {
        throw ModelError(ModelErrc::ShapeMismatch, "velocity gradient has the wrong shape");
    }
    const Offsets o(layout_);
    const Scalar* P = params_.data();
    Scalar* G = grad.data();
    auto W = [&](std::size_t off, int rows, int cols) { return ConstMap<Scalar>(P + off, rows, cols); };
    auto dW = [&](std::size_t off, int rows, int cols) { return MutMap<Scalar>(G + off, rows, cols); };

    Mat dsilu_c = Mat::Zero(1, d);

    // Output head.
    const ConstMap<Scalar> x(k.input.x.data(), cells, c.image_patch_dim());
    G[o.out_skip] += k.inv_tau * (dv.array() * x.array()).sum();
    const Mat dhead = dv * k.inv_tau;
    dW(o.out_w, d, c.image_patch_dim()).noalias() += k.o_final.transpose() * dhead;
    dW(o.out_b, 1, c.image_patch_dim()) += dhead.colwise().sum();
    const Mat dfg = dhead.cwiseProduct(k.gate);
    dW(o.fg_w, d, c.image_patch_dim()).noalias() += k.o_final.transpose() * dfg;
    dW(o.fg_b, 1, c.image_patch_dim()) += dfg.colwise().sum();
    Mat d_o = dhead * W(o.out_w, d, c.image_patch_dim()).transpose();
    d_o.noalias() += dfg * W(o.fg_w, d, c.image_patch_dim()).transpose();
    const Row<Scalar> fscale = k.mod_final.block(0, d, 1, d);
    Mat dmod(1, 2 * d);
    dmod.block(0, 0, 1, d) = d_o.colwise().sum();
    dmod.block(0, d, 1, d) = (d_o.array() * k.n_final.array()).colwise().sum();
    dW(o.fmod_w, d, 2 * d).noalias() += k.silu_c.transpose() * dmod;
    dW(o.fmod_b, 1, 2 * d) += dmod;
    dsilu_c.noalias() += dmod * W(o.fmod_w, d, 2 * d).transpose();
    const Mat dn_final = d_o.array().rowwise() * (fscale.array() + Scalar(1));

    Mat dh = Mat::Zero(s, d);
    dh.topRows(cells) = layer_norm_backward(k.n_final, k.rstd_final, dn_final);

    const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(hd));
    const int hidden = c.ffn_mult * d;
    for (std::size_t li = o.blocks.size(); li-- > 0;) {
        const auto& b = o.blocks[li];
        const auto& kb = k.blocks[li];
        const Row<Scalar> scale1 = kb.mod.block(0, d, 1, d), gate1 = kb.mod.block(0, 2 * d, 1, d),
                          scale2 = kb.mod.block(0, 4 * d, 1, d), gate2 = kb.mod.block(0, 5 * d, 1, d);
        Mat dm(1, 6 * d);

        // Feedforward branch: h_out = h_mid + gate2 * (g W2 + b2).
        const Mat y2 = (kb.g * W(b.w2, hidden, d)).rowwise() + Row<Scalar>(W(b.b2, 1, d));
        dm.block(0, 5 * d, 1, d) = (dh.array() * y2.array()).colwise().sum();
        const Mat dy2 = dh.array().rowwise() * gate2.array();
        dW(b.w2, hidden, d).noalias() += kb.g.transpose() * dy2;
        dW(b.b2, 1, d) += dy2.colwise().sum();
        Mat du = dy2 * W(b.w2, hidden, d).transpose();
        du.array() *= kb.u.unaryExpr([](Scalar v) { return gelu_grad(v); }).array();
        dW(b.w1, d, hidden).noalias() += kb.f.transpose() * du;
        dW(b.b1, 1, hidden) += du.colwise().sum();
        const Mat df = du * W(b.w1, d, hidden).transpose();
        dm.block(0, 3 * d, 1, d) = df.colwise().sum();
        dm.block(0, 4 * d, 1, d) = (df.array() * kb.n2.array()).colwise().sum();
        const Mat dn2 = df.array().rowwise() * (scale2.array() + Scalar(1));
        dh += layer_norm_backward(kb.n2, kb.rstd2, dn2);

        // Attention branch: h_mid = h_in + gate1 * (attn Wp + bp).
        const Mat y1 = (kb.attn * W(b.proj_w, d, d)).rowwise() + Row<Scalar>(W(b.proj_b, 1, d));
        dm.block(0, 2 * d, 1, d) = (dh.array() * y1.array()).colwise().sum();
        const Mat dy1 = dh.array().rowwise() * gate1.array();
        dW(b.proj_w, d, d).noalias() += kb.attn.transpose() * dy1;
        dW(b.proj_b, 1, d) += dy1.colwise().sum();
        const Mat dattn = dy1 * W(b.proj_w, d, d).transpose();

        Mat dqkv = Mat::Zero(s, 3 * d);
        if (k.mask) {
            for (int head = 0; head < c.heads; ++head) {
                const Scalar* base = kb.qkv.data() + head * hd;
                Scalar* dbase = dqkv.data() + head * hd;
                attention::attend_head_backward(*k.mask, base, base + d, base + 2 * d, static_cast<std::size_t>(3 * d),
                                                hd, kb.probs.data() + static_cast<std::size_t>(head) * k.mask->nnz(),
                                                dattn.data() + head * hd, static_cast<std::size_t>(d), dbase,
                                                dbase + d, dbase + 2 * d);
            }
        } else {
            for (int head = 0; head < c.heads; ++head) {
                const auto q = kb.qkv.block(0, head * hd, s, hd);
                const auto kk = kb.qkv.block(0, d + head * hd, s, hd);
                const auto v = kb.qkv.block(0, 2 * d + head * hd, s, hd);
                const auto p = kb.probs.block(static_cast<Eigen::Index>(head) * s, 0, s, s);
                const auto dout = dattn.block(0, head * hd, s, hd);
                dqkv.block(0, 2 * d + head * hd, s, hd).noalias() += p.transpose() * dout;
                Mat dp = dout * v.transpose();
                const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> row_dot = (dp.array() * p.array()).rowwise().sum();
                Mat ds = p.array() * (dp.array().colwise() - row_dot.array());
                ds *= scale;
                dqkv.block(0, head * hd, s, hd).noalias() += ds * kk;
                dqkv.block(0, d + head * hd, s, hd).noalias() += ds.transpose() * q;
            }
        }
        dW(b.qkv_w, d, 3 * d).noalias() += kb.a.transpose() * dqkv;
        dW(b.qkv_b, 1, 3 * d) += dqkv.colwise().sum();
        const Mat da = dqkv * W(b.qkv_w, d, 3 * d).transpose();
        dm.block(0, 0, 1, d) = da.colwise().sum();
        dm.block(0, d, 1, d) = (da.array() * kb.n1.array()).colwise().sum();
        const Mat dn1 = da.array().rowwise() * (scale1.array() + Scalar(1));
        dh += layer_norm_backward(kb.n1, kb.rstd1, dn1);

        dW(b.mod_w, d, 6 * d).noalias() += k.silu_c.transpose() * dm;
        dW(b.mod_b, 1, 6 * d) += dm;
        dsilu_c.noalias() += dm * W(b.mod_w, d, 6 * d).transpose();
    }

    // Embeddings.
    const ConstMap<Scalar> dp(k.input.depth.data(), cells, c.depth_patch_dim());
    dW(o.img_w, c.image_patch_dim(), d).noalias() += x.transpose() * dh.topRows(cells);
    dW(o.img_b, 1, d) += dh.topRows(cells).colwise().sum();
    dW(o.dep_w, c.depth_patch_dim(), d).noalias() += dp.transpose() * dh.bottomRows(cells);
    dW(o.dep_b, 1, d) += dh.bottomRows(cells).colwise().sum();
    int row = cells;
    auto table = dW(o.table, StyleVocabulary::kSize, d);
    auto embed_grad = [&](const std::vector<int>& ids) {
        for (int id : ids) {
            const int safe = (id >= 0 && id < StyleVocabulary::kSize) ? id : StyleVocabulary::kUnk;
            table.row(safe) += dh.row(row++);
        }
    };
    embed_grad(k.input.base);
    for (const auto& r : k.input.regions) embed_grad(r);

    // Time MLP.
    Mat dc = dsilu_c.array() * k.c.unaryExpr([](Scalar v) { return silu_grad(v); }).array();
    dW(o.t_w2, d, d).noalias() += k.a1.transpose() * dc;
    dW(o.t_b2, 1, d) += dc;
    Mat dz1 = (dc * W(o.t_w2, d, d).transpose()).array() * k.z1.unaryExpr([](Scalar v) { return silu_grad(v); }).array();
    const ConstMap<Scalar> tf(k.time_features.data(), 1, c.time_dim);
    dW(o.t_w1, c.time_dim, d).noalias() += tf.transpose() * dz1;
    dW(o.t_b1, 1, d) += dz1;
}

template class Denoiser<float>;
template class Denoiser<double>;
template std::vector<float> time_features(float, int);
template std::vector<double> time_features(double, int);
template Matrix<float> position_encoding(int, int);
template Matrix<double> position_encoding(int, int);

}  // namespace wordcraft::model
