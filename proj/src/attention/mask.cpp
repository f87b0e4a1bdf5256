// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/attention/mask.hpp"

#include <string>

#include "wordcraft/attention/errors.hpp"

namespace wordcraft::attention {

namespace {

void fill_block(AttentionMask& m, const Span& rows, const Span& cols, std::uint8_t value) {
    for (int i = rows.offset; i < rows.end(); ++i) {
        for (int j = cols.offset; j < cols.end(); ++j) m(i, j) = value;
    }
}

}  // namespace

AttentionMask assemble_mask(const TokenLayout& layout, const RegionSet& regions, BasePolicy policy) {
    validate(layout);
    if (layout.region_count() != regions.region_count()) {
        throw AttentionError(AttentionErrc::LayoutMismatch, "layout has " + std::to_string(layout.region_count()) +
                                                                " region spans, region set has " +
                                                                std::to_string(regions.region_count()));
    }
    if (regions.rows() != layout.rows || regions.cols() != layout.cols) {
        throw AttentionError(AttentionErrc::LayoutMismatch, "region grid shape differs from layout grid");
    }
    const int s = layout.size();
    if (layout.region_count() == 0) return AttentionMask(s, 1);

    AttentionMask m(s, 0);
    const int cells = layout.cells();
    const std::vector<int>& label = regions.labels;
    const Span& x = layout.image;
    const Span& d = layout.depth;

    // X and D: same region, in all four combinations.
    for (int a = 0; a < cells; ++a) {
        for (int b = 0; b < cells; ++b) {
            const std::uint8_t same = label[a] == label[b];
            m(x.offset + a, x.offset + b) = same;
            m(x.offset + a, d.offset + b) = same;
            m(d.offset + a, x.offset + b) = same;
        }
    }
    fill_block(m, d, d, 1);

    // Region prompts: own cells and own span only.
    for (int k = 0; k < layout.region_count(); ++k) {
        const Span& t = layout.regions[k];
        fill_block(m, t, t, 1);
        for (int a = 0; a < cells; ++a) {
            if (label[a] != k + 1) continue;
            for (int j = t.offset; j < t.end(); ++j) {
                m(x.offset + a, j) = 1;
                m(j, x.offset + a) = 1;
            }
        }
    }

    const Span& tb = layout.base;
    fill_block(m, tb, tb, 1);
    for (int a = 0; a < cells; ++a) {
        if (policy == BasePolicy::background_only && label[a] != 0) continue;
        for (int j = tb.offset; j < tb.end(); ++j) {
            m(x.offset + a, j) = 1;
            m(j, x.offset + a) = 1;
            m(d.offset + a, j) = 1;
            m(j, d.offset + a) = 1;
        }
    }
    return m;
}

SparseMask compress(const AttentionMask& mask) {
    SparseMask out;
    out.size = mask.size;
    out.row_begin.reserve(static_cast<std::size_t>(mask.size) + 1);
    out.row_begin.push_back(0);
    for (int i = 0; i < mask.size; ++i) {
        for (int j = 0; j < mask.size; ++j) {
            if (mask(i, j)) out.cols.push_back(j);
        }
        if (static_cast<int>(out.cols.size()) == out.row_begin.back()) {
            throw AttentionError(AttentionErrc::FullyMaskedRow, "query " + std::to_string(i) + " has no allowed key");
        }
        out.row_begin.push_back(static_cast<int>(out.cols.size()));
    }
    return out;
}

}  // namespace wordcraft::attention
