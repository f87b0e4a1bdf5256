// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wordcraft::model {

using Rgb = std::array<float, 3>;

enum class Color { red, green, blue, gray };
enum class Pattern { solid, stripes, dots, checker };

inline constexpr int kColorCount = 4;
inline constexpr int kPatternCount = 4;

const char* to_string(Color c);
const char* to_string(Pattern p);
Rgb rgb(Color c);

/// True where the pattern shows the full color; elsewhere it shows half the color.
bool pattern_on(Pattern p, int x, int y);
Rgb render_style(Pattern p, Color c, int x, int y);

/// Fixed token table: color tokens, pattern tokens, "<color>-background"
/// tokens, and a reserved UNK id for everything else.
class StyleVocabulary {
public:
    static constexpr int kUnk = 2 * kColorCount + kPatternCount;
    static constexpr int kSize = kUnk + 1;

    static int id(std::string_view token);
    static bool known(std::string_view token) { return id(token) != kUnk; }
    static std::string token(int id);
    static std::vector<int> ids(const std::vector<std::string>& tokens);

    static int color_id(Color c) { return static_cast<int>(c); }
    static int pattern_id(Pattern p) { return kColorCount + static_cast<int>(p); }
    static int background_id(Color c) { return kColorCount + kPatternCount + static_cast<int>(c); }

    static std::optional<Color> color_of(std::string_view token);
    static std::optional<Pattern> pattern_of(std::string_view token);
    static std::optional<Color> background_of(std::string_view token);
};

/// Foreground style named by a token list: the last color and last pattern
/// token win; pattern defaults to solid.
struct Style {
    std::optional<Color> color;
    Pattern pattern = Pattern::solid;
    std::optional<Color> background;
};
Style style_of(const std::vector<std::string>& tokens);

}  // namespace wordcraft::model
