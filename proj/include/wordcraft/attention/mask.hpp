// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "wordcraft/attention/layout.hpp"
#include "wordcraft/attention/regions.hpp"

namespace wordcraft::attention {

/// How the base prompt T_b relates to image and depth tokens.
enum class BasePolicy {
    global,           // T_b sees and is seen by every X and D token
    background_only,  // only tokens in the background region
};

/// S×S boolean matrix; row = query, column = key.
struct AttentionMask {
    int size = 0;
    std::vector<std::uint8_t> bits;

    AttentionMask() = default;
    explicit AttentionMask(int s, std::uint8_t fill = 0)
        : size(s), bits(static_cast<std::size_t>(s) * s, fill) {}

    std::uint8_t operator()(int i, int j) const { return bits[static_cast<std::size_t>(i) * size + j]; }
    std::uint8_t& operator()(int i, int j) { return bits[static_cast<std::size_t>(i) * size + j]; }
    bool operator==(const AttentionMask&) const = default;
};

AttentionMask assemble_mask(const TokenLayout& layout, const RegionSet& regions,
                            BasePolicy policy = BasePolicy::global);

/// Row-compressed allowed-key lists.
struct SparseMask {
    int size = 0;
    std::vector<int> row_begin;  // size + 1 entries
    std::vector<int> cols;

    int nnz() const { return static_cast<int>(cols.size()); }
};

/// Throws FullyMaskedRow if some query has no allowed key.
SparseMask compress(const AttentionMask& mask);

}  // namespace wordcraft::attention
