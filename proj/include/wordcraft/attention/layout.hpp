// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace wordcraft::attention {

struct Span {
    int offset = 0;
    int length = 0;
    int end() const { return offset + length; }
    bool contains(int i) const { return i >= offset && i < end(); }
    bool operator==(const Span&) const = default;
};

/// Token order is [X; T_b; T_1..T_N; D]. X and D both hold one token per
/// latent cell, in row-major cell order.
struct TokenLayout {
    int rows = 0;
    int cols = 0;
    Span image;
    Span base;
    std::vector<Span> regions;
    Span depth;

    int cells() const { return rows * cols; }
    int size() const { return depth.end(); }
    int region_count() const { return static_cast<int>(regions.size()); }
    bool operator==(const TokenLayout&) const = default;
};

TokenLayout make_layout(int rows, int cols, int base_length, const std::vector<int>& region_lengths);

/// Throws LayoutMismatch unless spans tile [0, size()) in order and |X| = |D| = rows*cols.
void validate(const TokenLayout& layout);

}  // namespace wordcraft::attention
