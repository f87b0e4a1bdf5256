// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wordcraft/glyph/outline.hpp"

namespace wordcraft::glyph {

/// Read-only view of a TrueType font with quadratic `glyf` outlines.
///
/// Only the cmap/head/hhea/hmtx/maxp/loca/glyf subset is consulted. CFF
/// flavoured OpenType and font collections are rejected as UnsupportedFont.
class Font {
public:
    explicit Font(std::vector<std::uint8_t> bytes);
    static Font from_file(const std::filesystem::path& path);

    int units_per_em() const { return units_per_em_; }
    std::uint16_t glyph_count() const { return num_glyphs_; }
    bool has_glyph(char32_t codepoint) const;
    std::uint16_t glyph_index(char32_t codepoint) const;

    /// Em-normalized outline. Composite glyphs are flattened by applying the
    /// component transforms recursively.
    GlyphOutline load_glyph(char32_t codepoint) const;

private:
    struct RawPoint {
        double x, y;
        bool on_curve;
    };
    using RawContour = std::vector<RawPoint>;

    std::span<const std::uint8_t> table(const char* tag) const;
    void parse_cmap();
    std::vector<RawContour> glyph_contours(std::uint16_t glyph, int depth) const;
    double advance(std::uint16_t glyph) const;

    std::vector<std::uint8_t> bytes_;
    std::map<std::string, std::span<const std::uint8_t>> tables_;
    std::map<char32_t, std::uint16_t> cmap_;
    int units_per_em_ = 0;
    bool long_loca_ = false;
    std::uint16_t num_glyphs_ = 0;
    std::uint16_t num_hmetrics_ = 0;
};

/// Convenience wrapper over Font.
GlyphOutline load_glyph(std::span<const std::uint8_t> font_bytes, char32_t codepoint);

}  // namespace wordcraft::glyph
