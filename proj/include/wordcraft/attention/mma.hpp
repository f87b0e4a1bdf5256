// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "wordcraft/attention/errors.hpp"
#include "wordcraft/attention/mask.hpp"

namespace wordcraft::attention {

/// q, k, v are [seq][heads * head_dim], head h occupying columns [h*head_dim, (h+1)*head_dim).
template <class T>
struct AttentionTensors {
    int seq = 0;
    int heads = 1;
    int head_dim = 1;
    std::vector<T> q, k, v;

    AttentionTensors() = default;
    AttentionTensors(int s, int h, int d)
        : seq(s), heads(h), head_dim(d), q(width(s, h, d)), k(q.size()), v(q.size()) {}
    std::size_t stride() const { return static_cast<std::size_t>(heads) * head_dim; }

private:
    static std::size_t width(int s, int h, int d) { return static_cast<std::size_t>(s) * h * d; }
};

/// One head of masked attention. Rows of q/k/v are `stride` apart, rows of
/// out `out_stride` apart; only allowed keys are read, in increasing column
/// order. `weights`, if non-null, receives the softmax weights aligned with
/// `mask.cols`.
template <class T>
void attend_head(const SparseMask& mask, const T* q, const T* k, const T* v, std::size_t stride, int head_dim,
                 T* out, std::size_t out_stride, T* weights = nullptr) {
    const T scale = T(1) / std::sqrt(static_cast<T>(head_dim));
    std::vector<T> logits;
    for (int i = 0; i < mask.size; ++i) {
        const int b = mask.row_begin[i], e = mask.row_begin[i + 1];
        if (b == e) throw AttentionError(AttentionErrc::FullyMaskedRow, "query " + std::to_string(i));
        logits.resize(static_cast<std::size_t>(e - b));
        const T* qi = q + i * stride;
        T m = -std::numeric_limits<T>::infinity();
        for (int n = b; n < e; ++n) {
            const T* kj = k + mask.cols[n] * stride;
            T dot = 0;
            for (int c = 0; c < head_dim; ++c) dot += qi[c] * kj[c];
            logits[n - b] = dot * scale;
            if (logits[n - b] > m) m = logits[n - b];
        }
        T sum = 0;
        for (T& l : logits) {
            l = std::exp(l - m);
            sum += l;
        }
        T* oi = out + i * out_stride;
        for (int c = 0; c < head_dim; ++c) oi[c] = 0;
        for (int n = b; n < e; ++n) {
            const T w = logits[n - b] / sum;
            if (weights) weights[n] = w;
            const T* vj = v + mask.cols[n] * stride;
            for (int c = 0; c < head_dim; ++c) oi[c] += w * vj[c];
        }
    }
}

/// Gradient of attend_head. Accumulates into dq, dk, dv (rows `stride` apart);
/// `weights` are those produced by the forward call.
template <class T>
void attend_head_backward(const SparseMask& mask, const T* q, const T* k, const T* v, std::size_t stride, int head_dim,
                          const T* weights, const T* dout, std::size_t dout_stride, T* dq, T* dk, T* dv) {
    const T scale = T(1) / std::sqrt(static_cast<T>(head_dim));
    std::vector<T> dp;
    for (int i = 0; i < mask.size; ++i) {
        const int b = mask.row_begin[i], e = mask.row_begin[i + 1];
        const T* doi = dout + i * dout_stride;
        dp.resize(static_cast<std::size_t>(e - b));
        T row_dot = 0;
        for (int n = b; n < e; ++n) {
            const int j = mask.cols[n];
            const T* vj = v + j * stride;
            T* dvj = dv + j * stride;
            const T w = weights[n];
            T dot = 0;
            for (int c = 0; c < head_dim; ++c) {
                dot += doi[c] * vj[c];
                dvj[c] += w * doi[c];
            }
            dp[n - b] = dot;
            row_dot += w * dot;
        }
        const T* qi = q + i * stride;
        T* dqi = dq + i * stride;
        for (int n = b; n < e; ++n) {
            const int j = mask.cols[n];
            const T ds = weights[n] * (dp[n - b] - row_dot) * scale;
            const T* kj = k + j * stride;
            T* dkj = dk + j * stride;
            for (int c = 0; c < head_dim; ++c) {
                dqi[c] += ds * kj[c];
                dkj[c] += ds * qi[c];
            }
        }
    }
}

/// Masked multi-head attention; returns [seq][heads*head_dim]. `weights`, if
/// non-null, receives heads × nnz softmax weights.
template <class T>
std::vector<T> masked_mma(const AttentionTensors<T>& t, const SparseMask& mask, std::vector<T>* weights = nullptr) {
    const std::size_t expected = static_cast<std::size_t>(t.seq) * t.stride();
    if (t.head_dim < 1 || t.heads < 1 || t.q.size() != expected || t.k.size() != expected || t.v.size() != expected) {
        throw AttentionError(AttentionErrc::ShapeMismatch, "q/k/v do not match seq x heads x head_dim");
    }
    if (mask.size != t.seq) {
        throw AttentionError(AttentionErrc::ShapeMismatch,
                             "mask is " + std::to_string(mask.size) + " wide, sequence is " + std::to_string(t.seq));
    }
    std::vector<T> out(expected);
    if (weights) weights->assign(static_cast<std::size_t>(t.heads) * mask.nnz(), T(0));
    for (int h = 0; h < t.heads; ++h) {
        const std::size_t col = static_cast<std::size_t>(h) * t.head_dim;
        attend_head(mask, t.q.data() + col, t.k.data() + col, t.v.data() + col, t.stride(), t.head_dim,
                    out.data() + col, t.stride(), weights ? weights->data() + static_cast<std::size_t>(h) * mask.nnz() : nullptr);
    }
    return out;
}

template <class T>
std::vector<T> masked_mma(const AttentionTensors<T>& t, const AttentionMask& mask, std::vector<T>* weights = nullptr) {
    if (mask.size != t.seq) {
        throw AttentionError(AttentionErrc::ShapeMismatch,
                             "mask is " + std::to_string(mask.size) + " wide, sequence is " + std::to_string(t.seq));
    }
    return masked_mma(t, compress(mask), weights);
}

/// Plain softmax attention over every key, without a mask.
template <class T>
std::vector<T> dense_mma(const AttentionTensors<T>& t) {
    SparseMask all;
    all.size = t.seq;
    all.row_begin.resize(static_cast<std::size_t>(t.seq) + 1);
    for (int i = 0; i <= t.seq; ++i) all.row_begin[i] = i * t.seq;
    all.cols.resize(static_cast<std::size_t>(t.seq) * t.seq);
    for (std::size_t n = 0; n < all.cols.size(); ++n) all.cols[n] = static_cast<int>(n % t.seq);
    return masked_mma(t, all);
}

}  // namespace wordcraft::attention
