// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations shared by the unit tests and the
// acceptance runner. None of these call the code they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "wordcraft/attention/layout.hpp"
#include "wordcraft/attention/mma.hpp"
#include "wordcraft/attention/regions.hpp"
#include "wordcraft/glyph/outline.hpp"

namespace wordcraft::oracles {

// ---------------------------------------------------------------------------
// Attention mask: classify each (query, key) pair and apply the block rules.

struct Role {
    enum Kind { X, Tb, Tk, D } kind;
    int index;  // cell for X/D, region number for Tk
};

inline Role role_of(const attention::TokenLayout& l, int i) {
    if (l.image.contains(i)) return {Role::X, i - l.image.offset};
    if (l.base.contains(i)) return {Role::Tb, 0};
    for (int k = 0; k < l.region_count(); ++k) {
        if (l.regions[k].contains(i)) return {Role::Tk, k + 1};
    }
    if (!l.depth.contains(i)) throw std::logic_error("token outside every span");
    return {Role::D, i - l.depth.offset};
}

inline bool mask_entry(const attention::TokenLayout& l, const attention::RegionSet& r, attention::BasePolicy policy, int i,
                       int j) {
    if (l.region_count() == 0) return true;
    const Role a = role_of(l, i), b = role_of(l, j);
    auto label = [&](int cell) { return r.labels[cell]; };
    auto base_sees = [&](int cell) { return policy == attention::BasePolicy::global || label(cell) == 0; };
    using K = Role::Kind;
    if ((a.kind == K::X || a.kind == K::D) && (b.kind == K::X || b.kind == K::D)) {
        if (a.kind == K::D && b.kind == K::D) return true;
        return label(a.index) == label(b.index);
    }
    if (a.kind == K::X && b.kind == K::Tk) return label(a.index) == b.index;
    if (a.kind == K::Tk && b.kind == K::X) return label(b.index) == a.index;
    if (a.kind == K::Tk && b.kind == K::Tk) return a.index == b.index;
    if (a.kind == K::Tb && b.kind == K::Tb) return true;
    if ((a.kind == K::Tb && b.kind == K::Tk) || (a.kind == K::Tk && b.kind == K::Tb)) return false;
    if ((a.kind == K::Tk && b.kind == K::D) || (a.kind == K::D && b.kind == K::Tk)) return false;
    if (a.kind == K::Tb) return base_sees(b.index);  // b is X or D
    if (b.kind == K::Tb) return base_sees(a.index);
    throw std::logic_error("unclassified pair");
}

struct MaskConfig {
    attention::TokenLayout layout;
    attention::RegionSet regions;
};

inline MaskConfig random_mask_config(std::mt19937& rng) {
    for (;;) {
        const int rows = std::uniform_int_distribution<int>(1, 4)(rng);
        const int cols = std::uniform_int_distribution<int>(1, 4)(rng);
        const int n = std::uniform_int_distribution<int>(0, 4)(rng);
        const int base = std::uniform_int_distribution<int>(0, 3)(rng);
        std::vector<int> lens;
        for (int k = 0; k < n; ++k) lens.push_back(std::uniform_int_distribution<int>(0, 4)(rng));
        attention::TokenLayout layout = attention::make_layout(rows, cols, base, lens);
        if (layout.size() > 64) continue;
        std::vector<attention::BinaryGrid> masks(n, attention::BinaryGrid(rows, cols));
        for (int c = 0; c < rows * cols; ++c) {
            const int k = std::uniform_int_distribution<int>(0, n)(rng);
            if (k > 0) masks[k - 1].cells[c] = 1;
        }
        return {layout, attention::resolve_regions(masks, rows, cols)};
    }
}

template <class Scalar>
attention::AttentionTensors<Scalar> random_tensors(std::mt19937& rng, int s, int h, int d) {
    attention::AttentionTensors<Scalar> t(s, h, d);
    std::normal_distribution<Scalar> g;
    for (auto* vec : {&t.q, &t.k, &t.v}) {
        for (Scalar& x : *vec) x = g(rng);
    }
    return t;
}

// Textbook dense attention in long double, written without the sparse machinery.
inline std::vector<double> reference_dense(const attention::AttentionTensors<double>& t) {
    std::vector<double> out(t.q.size());
    const std::size_t w = t.stride();
    for (int h = 0; h < t.heads; ++h) {
        for (int i = 0; i < t.seq; ++i) {
            std::vector<long double> s(t.seq);
            for (int j = 0; j < t.seq; ++j) {
                long double dot = 0;
                for (int c = 0; c < t.head_dim; ++c) dot += (long double)t.q[i * w + h * t.head_dim + c] * t.k[j * w + h * t.head_dim + c];
                s[j] = std::exp(dot / std::sqrt((long double)t.head_dim));
            }
            long double z = 0;
            for (long double e : s) z += e;
            for (int c = 0; c < t.head_dim; ++c) {
                long double acc = 0;
                for (int j = 0; j < t.seq; ++j) acc += s[j] / z * t.v[j * w + h * t.head_dim + c];
                out[i * w + h * t.head_dim + c] = static_cast<double>(acc);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Glyph

/// Circle from four cubic arcs (the usual kappa construction).
inline glyph::GlyphOutline circle(double cx, double cy, double r) {
    using glyph::Point;
    constexpr double k = 0.5522847498307936;  // 4/3 (sqrt(2) - 1)
    const Point e{cx + r, cy}, n{cx, cy + r}, w{cx - r, cy}, s{cx, cy - r};
    glyph::Contour c = {
        {{e, {cx + r, cy + k * r}, {cx + k * r, cy + r}, n}},
        {{n, {cx - k * r, cy + r}, {cx - r, cy + k * r}, w}},
        {{w, {cx - r, cy - k * r}, {cx - k * r, cy - r}, s}},
        {{s, {cx + k * r, cy - r}, {cx + r, cy - k * r}, e}},
    };
    return {{c}, 1.0, 0};
}

// Brute force: min over all outside pixels (canvas plus a one-pixel ring) of dx^2 + dy^2.
inline std::vector<double> brute_force_sq_edt(const std::vector<std::uint8_t>& inside, int w, int h) {
    std::vector<double> out(inside.size(), 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!inside[y * w + x]) continue;
            long best = -1;
            for (int v = -1; v <= h; ++v) {
                for (int u = -1; u <= w; ++u) {
                    const bool ring = u < 0 || v < 0 || u >= w || v >= h;
                    if (!ring && inside[v * w + u]) continue;
                    const long d = static_cast<long>(u - x) * (u - x) + static_cast<long>(v - y) * (v - y);
                    if (best < 0 || d < best) best = d;
                }
            }
            out[y * w + x] = static_cast<double>(best);
        }
    }
    return out;
}

}  // namespace wordcraft::oracles
