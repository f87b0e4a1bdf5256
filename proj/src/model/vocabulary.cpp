// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/model/vocabulary.hpp"

namespace wordcraft::model {

namespace {

constexpr std::array<const char*, kColorCount> kColorNames = {"red", "green", "blue", "gray"};
constexpr std::array<const char*, kPatternCount> kPatternNames = {"solid", "stripes", "dots", "checker"};
constexpr std::array<Rgb, kColorCount> kColors = {{{0.9f, 0.1f, 0.1f}, {0.1f, 0.8f, 0.1f}, {0.1f, 0.2f, 0.9f}, {0.5f, 0.5f, 0.5f}}};

}  // namespace

const char* to_string(Color c) { return kColorNames[static_cast<int>(c)]; }
const char* to_string(Pattern p) { return kPatternNames[static_cast<int>(p)]; }
Rgb rgb(Color c) { return kColors[static_cast<int>(c)]; }

bool pattern_on(Pattern p, int x, int y) {
    switch (p) {
        case Pattern::solid: return true;
        case Pattern::stripes: return (x + y) % 8 < 4;
        case Pattern::dots: {
            const float dx = static_cast<float>(x % 8) + 0.5f - 4.0f;
            const float dy = static_cast<float>(y % 8) + 0.5f - 4.0f;
            return dx * dx + dy * dy <= 4.0f;
        }
        case Pattern::checker: return (x / 8 + y / 8) % 2 == 0;
    }
    return true;
}

Rgb render_style(Pattern p, Color c, int x, int y) {
    Rgb out = rgb(c);
    if (!pattern_on(p, x, y)) {
        for (float& v : out) v *= 0.5f;
    }
    return out;
}

int StyleVocabulary::id(std::string_view token) {
    if (auto c = color_of(token)) return color_id(*c);
    if (auto p = pattern_of(token)) return pattern_id(*p);
    if (auto b = background_of(token)) return background_id(*b);
    return kUnk;
}

std::string StyleVocabulary::token(int id) {
    if (id >= 0 && id < kColorCount) return kColorNames[id];
    if (id >= kColorCount && id < kColorCount + kPatternCount) return kPatternNames[id - kColorCount];
    if (id >= kColorCount + kPatternCount && id < kUnk) {
        return std::string(kColorNames[id - kColorCount - kPatternCount]) + "-background";
    }
    return "<unk>";
}

std::vector<int> StyleVocabulary::ids(const std::vector<std::string>& tokens) {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const std::string& t : tokens) out.push_back(id(t));
    return out;
}

std::optional<Color> StyleVocabulary::color_of(std::string_view token) {
    for (int i = 0; i < kColorCount; ++i) {
        if (token == kColorNames[i]) return static_cast<Color>(i);
    }
    return std::nullopt;
}

std::optional<Pattern> StyleVocabulary::pattern_of(std::string_view token) {
    for (int i = 0; i < kPatternCount; ++i) {
        if (token == kPatternNames[i]) return static_cast<Pattern>(i);
    }
    return std::nullopt;
}

std::optional<Color> StyleVocabulary::background_of(std::string_view token) {
    constexpr std::string_view suffix = "-background";
    if (token.size() <= suffix.size() || token.substr(token.size() - suffix.size()) != suffix) return std::nullopt;
    return color_of(token.substr(0, token.size() - suffix.size()));
}

Style style_of(const std::vector<std::string>& tokens) {
    Style s;
    for (const std::string& t : tokens) {
        if (auto c = StyleVocabulary::color_of(t)) s.color = c;
        else if (auto p = StyleVocabulary::pattern_of(t)) s.pattern = *p;
        else if (auto b = StyleVocabulary::background_of(t)) s.background = b;
    }
    return s;
}

}  // namespace wordcraft::model
