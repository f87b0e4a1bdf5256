// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "wordcraft/glyph/depth.hpp"
#include "wordcraft/glyph/truetype.hpp"
#include "wordcraft/image.hpp"

namespace wordcraft::glyph {

/// Coverage and pseudo-depth of a character or word, ready for conditioning.
struct PreparedText {
    std::string text;
    Image coverage;
    DepthMap depth;
};

/// Loads every code point of `text` (UTF-8), composes them left to right and
/// derives the depth map. Throws MissingGlyph / InvalidDimensions.
PreparedText prepare_text(const Font& font, std::string_view text, int size, int margin);

}  // namespace wordcraft::glyph
