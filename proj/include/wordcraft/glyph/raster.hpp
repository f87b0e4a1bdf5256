// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "wordcraft/glyph/outline.hpp"
#include "wordcraft/image.hpp"

namespace wordcraft::glyph {

/// Maximum distance between a flattened polyline and its curve, in subpixels.
inline constexpr double kFlatteningTolerance = 0.25;
inline constexpr int kDefaultSupersample = 4;

/// Appends a polyline approximation of `segment` (excluding its start point) to
/// `out`, subdividing until the control polygon lies within `tolerance` of the chord.
void flatten(const CubicSegment& segment, double tolerance, std::vector<Point>& out);

/// Nonzero-winding coverage of `outline`, mapping normalized [0,1]^2 (y up) onto
/// the canvas (origin top-left). Each pixel averages supersample^2 point samples.
/// An outline without contours yields all-zero coverage.
Image rasterize(const GlyphOutline& outline, int width, int height, int supersample = kDefaultSupersample);

/// Concatenates glyphs left-to-right, offsetting each by the sum of the
/// preceding advance widths. The result stays in em units.
GlyphOutline layout_word(std::span<const GlyphOutline> glyphs);

/// Transform that centers the ink bounds of `outline` in the canvas and scales
/// uniformly to fit inside `margin` pixels on every side. The output is in the
/// normalized frame consumed by rasterize.
Affine fit_transform(const Bounds& ink, int width, int height, int margin);

/// layout_word + fit_transform + rasterize.
Image compose_word(std::span<const GlyphOutline> glyphs, int width, int height, int margin,
                   int supersample = kDefaultSupersample);

}  // namespace wordcraft::glyph
