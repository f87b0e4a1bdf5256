// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/glyph/depth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wordcraft::glyph {

namespace {

constexpr double kInf = 1e20;

// 1-D squared distance transform of sampled function f (lower envelope of parabolas).
void transform_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    auto intersect = [&](int q, int p) {
        return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * q - 2.0 * p);
    };
    for (int q = 1; q < n; ++q) {
        double s = intersect(q, v[k]);
        while (s <= z[k]) {
            --k;
            s = intersect(q, v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = static_cast<double>(q - v[k]);
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace

Image DepthMap::to_image() const {
    Image img(width, height, 1);
    img.values = values;
    return img;
}

std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& inside, int width, int height) {
    if (width < 0 || height < 0 || inside.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw std::invalid_argument("mask size does not match dimensions");
    }
    // Pad with a ring of outside pixels.
    const int pw = width + 2, ph = height + 2;
    std::vector<double> grid(static_cast<std::size_t>(pw) * ph, 0.0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (inside[static_cast<std::size_t>(y) * width + x]) {
                grid[static_cast<std::size_t>(y + 1) * pw + (x + 1)] = kInf;
            }
        }
    }
    const int n = std::max(pw, ph);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);
    // Columns then rows.
    f.resize(ph);
    d.resize(ph);
    for (int x = 0; x < pw; ++x) {
        for (int y = 0; y < ph; ++y) f[y] = grid[static_cast<std::size_t>(y) * pw + x];
        transform_1d(f, d, v, z);
        for (int y = 0; y < ph; ++y) grid[static_cast<std::size_t>(y) * pw + x] = d[y];
    }
    f.resize(pw);
    d.resize(pw);
    for (int y = 0; y < ph; ++y) {
        for (int x = 0; x < pw; ++x) f[x] = grid[static_cast<std::size_t>(y) * pw + x];
        transform_1d(f, d, v, z);
        for (int x = 0; x < pw; ++x) grid[static_cast<std::size_t>(y) * pw + x] = d[x];
    }
    std::vector<double> out(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            out[static_cast<std::size_t>(y) * width + x] = grid[static_cast<std::size_t>(y + 1) * pw + (x + 1)];
        }
    }
    return out;
}

DepthMap depth_from_coverage(const Image& coverage) {
    if (coverage.channels != 1) {
        throw std::invalid_argument("depth_from_coverage expects single-channel coverage");
    }
    std::vector<std::uint8_t> inside(coverage.pixel_count());
    for (std::size_t i = 0; i < inside.size(); ++i) inside[i] = coverage.values[i] > 0.5f ? 1 : 0;
    const std::vector<double> sq = squared_distance_transform(inside, coverage.width, coverage.height);

    DepthMap depth;
    depth.width = coverage.width;
    depth.height = coverage.height;
    depth.values.assign(sq.size(), 0.0f);
    const double max_sq = sq.empty() ? 0.0 : *std::max_element(sq.begin(), sq.end());
    if (max_sq <= 0.0) return depth;
    const double max_dist = std::sqrt(max_sq);
    for (std::size_t i = 0; i < sq.size(); ++i) {
        depth.values[i] = static_cast<float>(std::sqrt(sq[i]) / max_dist);
    }
    return depth;
}

}  // namespace wordcraft::glyph
