// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/model/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include "json.hpp"

namespace wordcraft::model {

const std::vector<std::string>& default_glyph_texts() {
    static const std::vector<std::string> texts = {
        "A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L", "M", "N", "O", "P", "Q",
        "R", "S", "T", "U", "V", "W", "X", "Y", "Z", "OK", "HI", "GO", "AZ",
    };
    return texts;
}

GlyphSet GlyphSet::build(const glyph::Font& font, const std::vector<std::string>& texts, int size, int margin) {
    GlyphSet set;
    set.size = size;
    for (const std::string& t : texts) set.glyphs.push_back(glyph::prepare_text(font, t, size, margin));
    return set;
}

Image render_styled(const glyph::DepthMap& depth, Pattern pattern, Color color, Color background) {
    Image img(depth.width, depth.height, 3);
    const Rgb bg = rgb(background);
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            const Rgb px = depth.at(x, y) > 0.0f ? render_style(pattern, color, x, y) : bg;
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = px[c];
        }
    }
    return img;
}

std::vector<TrainingExample> synth_dataset(const GlyphSet& glyphs, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_glyph(0, static_cast<int>(glyphs.glyphs.size()) - 1);
    std::uniform_int_distribution<int> pick_color(0, kColorCount - 1);
    std::uniform_int_distribution<int> pick_other(0, kColorCount - 2);
    std::uniform_int_distribution<int> pick_pattern(0, kPatternCount - 1);
    std::vector<TrainingExample> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        TrainingExample e;
        e.glyph = pick_glyph(rng);
        e.pattern = static_cast<Pattern>(pick_pattern(rng));
        e.color = static_cast<Color>(pick_color(rng));
        int bg = pick_other(rng);
        if (bg >= static_cast<int>(e.color)) ++bg;
        e.background = static_cast<Color>(bg);
        e.depth = glyphs.glyphs[static_cast<std::size_t>(e.glyph)].depth;
        e.image = render_styled(e.depth, e.pattern, e.color, e.background);
        e.tokens = {to_string(e.pattern), to_string(e.color), std::string(to_string(e.background)) + "-background"};
        out.push_back(std::move(e));
    }
    return out;
}

void export_dataset(const std::vector<TrainingExample>& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream manifest(dir / "manifest.jsonl");
    for (std::size_t i = 0; i < data.size(); ++i) {
        char stem[16];
        std::snprintf(stem, sizeof stem, "%05zu", i);
        const std::string image_name = std::string(stem) + ".png";
        const std::string depth_name = std::string(stem) + "-depth.png";
        write_file(dir / image_name, png::encode(data[i].image));
        write_file(dir / depth_name, png::encode(data[i].depth.to_image(), 16));
        manifest << nlohmann::json{{"image", image_name}, {"depth", depth_name}, {"tokens", data[i].tokens}, {"glyph", data[i].glyph}}.dump()
                 << "\n";
    }
    if (!manifest) throw ImageError("failed to write dataset manifest in " + dir.string());
}

}  // namespace wordcraft::model
