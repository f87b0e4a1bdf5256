// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wordcraft/glyph/prepare.hpp"
#include "wordcraft/image.hpp"
#include "wordcraft/model/vocabulary.hpp"

namespace wordcraft::model {

/// Characters and words the synthetic set draws from.
const std::vector<std::string>& default_glyph_texts();

/// Prepared glyphs at the model's image size.
struct GlyphSet {
    int size = 0;
    std::vector<glyph::PreparedText> glyphs;

    static GlyphSet build(const glyph::Font& font, const std::vector<std::string>& texts, int size, int margin = 4);
};

struct TrainingExample {
    Image image;  // 3 channels
    glyph::DepthMap depth;
    std::vector<std::string> tokens;  // pattern, color, "<color>-background"
    int glyph = 0;
    Pattern pattern = Pattern::solid;
    Color color = Color::red;
    Color background = Color::gray;
};

/// Foreground pixels (depth > 0) in the given style, the rest in the solid
/// background color.
Image render_styled(const glyph::DepthMap& depth, Pattern pattern, Color color, Color background);

/// Uniform glyph, pattern and color; the background color is uniform over the
/// colors different from the foreground color.
std::vector<TrainingExample> synth_dataset(const GlyphSet& glyphs, int count, std::uint64_t seed);

/// Writes `<dir>/NNNNN.png`, `<dir>/NNNNN-depth.png` and `<dir>/manifest.jsonl`.
void export_dataset(const std::vector<TrainingExample>& data, const std::filesystem::path& dir);

}  // namespace wordcraft::model
