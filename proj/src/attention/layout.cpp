// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/attention/layout.hpp"

#include <string>

#include "wordcraft/attention/errors.hpp"

namespace wordcraft::attention {

const char* to_string(AttentionErrc code) {
    switch (code) {
        case AttentionErrc::IndivisibleDimensions: return "IndivisibleDimensions";
        case AttentionErrc::OverlappingRegions: return "OverlappingRegions";
        case AttentionErrc::LayoutMismatch: return "LayoutMismatch";
        case AttentionErrc::FullyMaskedRow: return "FullyMaskedRow";
        case AttentionErrc::ShapeMismatch: return "ShapeMismatch";
        case AttentionErrc::MalformedMask: return "MalformedMask";
    }
    return "?";
}

TokenLayout make_layout(int rows, int cols, int base_length, const std::vector<int>& region_lengths) {
    if (rows < 1 || cols < 1 || base_length < 0) {
        throw AttentionError(AttentionErrc::LayoutMismatch, "grid must be non-empty and span lengths non-negative");
    }
    TokenLayout layout;
    layout.rows = rows;
    layout.cols = cols;
    int at = 0;
    auto take = [&](int n) {
        if (n < 0) throw AttentionError(AttentionErrc::LayoutMismatch, "negative span length");
        Span s{at, n};
        at += n;
        return s;
    };
    layout.image = take(rows * cols);
    layout.base = take(base_length);
    for (int n : region_lengths) layout.regions.push_back(take(n));
    layout.depth = take(rows * cols);
    return layout;
}

void validate(const TokenLayout& layout) {
    auto fail = [](const std::string& why) { throw AttentionError(AttentionErrc::LayoutMismatch, why); };
    if (layout.rows < 1 || layout.cols < 1) fail("empty grid");
    if (layout.image.length != layout.cells() || layout.depth.length != layout.cells()) {
        fail("image and depth spans must hold rows*cols tokens");
    }
    int at = 0;
    auto next = [&](const Span& s, const char* name) {
        if (s.offset != at || s.length < 0) fail(std::string(name) + " span is not contiguous");
        at = s.end();
    };
    next(layout.image, "image");
    next(layout.base, "base");
    for (const Span& s : layout.regions) next(s, "region");
    next(layout.depth, "depth");
}

}  // namespace wordcraft::attention
