// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wordcraft/image.hpp"

namespace wordcraft::attention {

/// Binary row-major grid, used for both pixel masks and latent masks.
struct BinaryGrid {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> cells;

    BinaryGrid() = default;
    BinaryGrid(int rows_, int cols_, std::uint8_t fill = 0);

    std::uint8_t at(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c]; }
    std::uint8_t& at(int r, int c) { return cells[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t count() const;
    bool operator==(const BinaryGrid&) const = default;
};

/// Latent cell is set iff any pixel of its patch is set.
BinaryGrid downsample_mask(const BinaryGrid& pixels, int rows, int cols);

struct RegionSet {
    std::vector<BinaryGrid> pixel_masks;  // may be empty when built from latent masks
    std::vector<BinaryGrid> latent_masks;
    BinaryGrid background;
    std::vector<int> labels;  // per latent cell: 0 for background, k for region k

    int region_count() const { return static_cast<int>(latent_masks.size()); }
    int rows() const { return background.rows; }
    int cols() const { return background.cols; }
};

/// Checks disjointness and derives the background. `rows`/`cols` give the grid
/// shape when `masks` is empty.
RegionSet resolve_regions(const std::vector<BinaryGrid>& masks, int rows = 0, int cols = 0);

/// Downsamples each pixel mask, then resolves.
RegionSet resolve_pixel_regions(const std::vector<BinaryGrid>& pixel_masks, int rows, int cols);

/// `rle:<width>x<height>:<run>,<run>,...`, alternating zero/one runs starting with zero.
std::string encode_rle(const BinaryGrid& mask);
BinaryGrid decode_rle(std::string_view text);

/// Nonzero in any channel means in-region.
BinaryGrid mask_from_image(const Image& image);
Image mask_to_image(const BinaryGrid& mask);

/// Accepts either an RLE string or PNG bytes.
BinaryGrid decode_mask(std::string_view data);

}  // namespace wordcraft::attention
