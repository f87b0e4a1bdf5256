// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/attention/regions.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "wordcraft/attention/errors.hpp"

namespace wordcraft::attention {

BinaryGrid::BinaryGrid(int rows_, int cols_, std::uint8_t fill)
    : rows(rows_), cols(cols_), cells(static_cast<std::size_t>(rows_) * cols_, fill) {}

std::size_t BinaryGrid::count() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](std::uint8_t c) { return c != 0; }));
}

BinaryGrid downsample_mask(const BinaryGrid& pixels, int rows, int cols) {
    if (rows < 1 || cols < 1 || pixels.rows % rows != 0 || pixels.cols % cols != 0) {
        throw AttentionError(AttentionErrc::IndivisibleDimensions,
                             std::to_string(pixels.cols) + "x" + std::to_string(pixels.rows) + " mask onto " +
                                 std::to_string(cols) + "x" + std::to_string(rows) + " grid");
    }
    const int ph = pixels.rows / rows, pw = pixels.cols / cols;
    BinaryGrid out(rows, cols);
    for (int y = 0; y < pixels.rows; ++y) {
        for (int x = 0; x < pixels.cols; ++x) {
            if (pixels.at(y, x)) out.at(y / ph, x / pw) = 1;
        }
    }
    return out;
}

RegionSet resolve_regions(const std::vector<BinaryGrid>& masks, int rows, int cols) {
    if (!masks.empty()) {
        rows = masks.front().rows;
        cols = masks.front().cols;
    }
    if (rows < 1 || cols < 1) throw AttentionError(AttentionErrc::ShapeMismatch, "region grid is empty");
    RegionSet set;
    set.labels.assign(static_cast<std::size_t>(rows) * cols, 0);
    std::vector<int> overlaps;
    for (std::size_t k = 0; k < masks.size(); ++k) {
        const BinaryGrid& m = masks[k];
        if (m.rows != rows || m.cols != cols || m.cells.size() != set.labels.size()) {
            throw AttentionError(AttentionErrc::ShapeMismatch, "region " + std::to_string(k + 1) + " grid shape differs");
        }
        BinaryGrid norm(rows, cols);
        for (std::size_t c = 0; c < m.cells.size(); ++c) {
            if (!m.cells[c]) continue;
            norm.cells[c] = 1;
            if (set.labels[c] != 0) overlaps.push_back(static_cast<int>(c));
            else set.labels[c] = static_cast<int>(k) + 1;
        }
        set.latent_masks.push_back(std::move(norm));
    }
    if (!overlaps.empty()) {
        std::sort(overlaps.begin(), overlaps.end());
        overlaps.erase(std::unique(overlaps.begin(), overlaps.end()), overlaps.end());
        std::string list;
        for (int c : overlaps) {
            if (!list.empty()) list += ",";
            list += std::to_string(c);
        }
        throw AttentionError(AttentionErrc::OverlappingRegions, "cells " + list);
    }
    set.background = BinaryGrid(rows, cols);
    for (std::size_t c = 0; c < set.labels.size(); ++c) set.background.cells[c] = set.labels[c] == 0;
    return set;
}

RegionSet resolve_pixel_regions(const std::vector<BinaryGrid>& pixel_masks, int rows, int cols) {
    std::vector<BinaryGrid> latent;
    for (const BinaryGrid& m : pixel_masks) latent.push_back(downsample_mask(m, rows, cols));
    RegionSet set = resolve_regions(latent, rows, cols);
    set.pixel_masks = pixel_masks;
    return set;
}

std::string encode_rle(const BinaryGrid& mask) {
    std::string out = "rle:" + std::to_string(mask.cols) + "x" + std::to_string(mask.rows) + ":";
    std::uint8_t current = 0;
    std::size_t run = 0;
    bool first = true;
    auto emit = [&] {
        if (!first) out += ",";
        out += std::to_string(run);
        first = false;
    };
    for (std::uint8_t c : mask.cells) {
        const std::uint8_t bit = c ? 1 : 0;
        if (bit != current) {
            emit();
            current = bit;
            run = 0;
        }
        ++run;
    }
    emit();
    return out;
}

namespace {

[[noreturn]] void malformed(const std::string& why) { throw AttentionError(AttentionErrc::MalformedMask, why); }

long long parse_number(std::string_view s, const char* what) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
        malformed(std::string("bad ") + what + " '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

BinaryGrid decode_rle(std::string_view text) {
    if (text.substr(0, 4) != "rle:") malformed("missing 'rle:' prefix");
    text.remove_prefix(4);
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos) malformed("missing ':' after dimensions");
    const std::string_view dims = text.substr(0, colon);
    const std::size_t x = dims.find('x');
    if (x == std::string_view::npos) malformed("dimensions must be <width>x<height>");
    const long long w = parse_number(dims.substr(0, x), "width");
    const long long h = parse_number(dims.substr(x + 1), "height");
    if (w < 1 || h < 1 || w * h > (1LL << 26)) malformed("dimensions out of range");
    BinaryGrid out(static_cast<int>(h), static_cast<int>(w));
    std::string_view runs = text.substr(colon + 1);
    std::size_t at = 0;
    std::uint8_t bit = 0;
    while (true) {
        const std::size_t comma = runs.find(',');
        const long long n = parse_number(runs.substr(0, comma), "run");
        if (static_cast<long long>(at) + n > w * h) malformed("runs exceed width*height");
        std::fill_n(out.cells.begin() + static_cast<std::ptrdiff_t>(at), n, bit);
        at += static_cast<std::size_t>(n);
        bit ^= 1;
        if (comma == std::string_view::npos) break;
        runs.remove_prefix(comma + 1);
    }
    if (static_cast<long long>(at) != w * h) malformed("runs cover " + std::to_string(at) + " of " + std::to_string(w * h) + " pixels");
    return out;
}

BinaryGrid mask_from_image(const Image& image) {
    BinaryGrid out(image.height, image.width);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            for (int c = 0; c < image.channels; ++c) {
                if (image.at(x, y, c) != 0.0f) out.at(y, x) = 1;
            }
        }
    }
    return out;
}

Image mask_to_image(const BinaryGrid& mask) {
    Image img(mask.cols, mask.rows, 1);
    for (std::size_t i = 0; i < mask.cells.size(); ++i) img.values[i] = mask.cells[i] ? 1.0f : 0.0f;
    return img;
}

BinaryGrid decode_mask(std::string_view data) {
    if (data.substr(0, 4) == "rle:") return decode_rle(data);
    try {
        return mask_from_image(png::decode(std::vector<std::uint8_t>(data.begin(), data.end())));
    } catch (const ImageError& e) {
        malformed(std::string("mask is neither RLE nor PNG: ") + e.what());
    }
}

}  // namespace wordcraft::attention
