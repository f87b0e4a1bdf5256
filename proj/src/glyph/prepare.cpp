// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/glyph/prepare.hpp"

#include "wordcraft/glyph/raster.hpp"

namespace wordcraft::glyph {

PreparedText prepare_text(const Font& font, std::string_view text, int size, int margin) {
    const std::u32string codepoints = decode_utf8(text);
    if (codepoints.empty()) throw GlyphError(GlyphErrc::InvalidDimensions, "text is empty");
    std::vector<GlyphOutline> outlines;
    for (char32_t cp : codepoints) outlines.push_back(font.load_glyph(cp));
    PreparedText out;
    out.text = std::string(text);
    out.coverage = compose_word(outlines, size, size, margin);
    out.depth = depth_from_coverage(out.coverage);
    return out;
}

}  // namespace wordcraft::glyph
