// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "wordcraft/image.hpp"

namespace wordcraft::glyph {

/// Pseudo-depth in [0,1], row-major, same size as the coverage it came from.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    bool operator==(const DepthMap&) const = default;

    /// Single-channel image view, e.g. for PNG export.
    Image to_image() const;
};

/// Squared Euclidean distance from every pixel to the nearest pixel with
/// inside == 0, where the canvas is surrounded by a one-pixel ring of outside
/// pixels. Outside pixels get 0. Exact (Felzenszwalb-Huttenlocher lower envelope).
std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& inside, int width, int height);

/// Distance transform of {coverage > 0.5} divided by its maximum. All-zero
/// interior yields all-zero depth.
DepthMap depth_from_coverage(const Image& coverage);

}  // namespace wordcraft::glyph
