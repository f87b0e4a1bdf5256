// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/sampler/evaluate.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "wordcraft/sampler/sampler.hpp"

namespace wordcraft::sampler {

using attention::BinaryGrid;
using model::Color;
using model::Pattern;

namespace {

// Relative on/off luminance contrast a template must reach to count as a pattern.
constexpr double kPatternContrast = 0.25;

double luminance(const Image& image, int x, int y) {
    return (image.at(x, y, 0) + image.at(x, y, 1) + image.at(x, y, 2)) / 3.0;
}

double rgb_distance(const model::Rgb& a, const model::Rgb& b) {
    double s = 0;
    for (int c = 0; c < 3; ++c) s += double(a[c] - b[c]) * double(a[c] - b[c]);
    return std::sqrt(s);
}

}  // namespace

Pattern detect_pattern(const Image& image, const BinaryGrid& pixels) {
    Pattern best = Pattern::solid;
    double best_contrast = kPatternContrast;
    for (Pattern p : {Pattern::stripes, Pattern::dots, Pattern::checker}) {
        double on = 0, off = 0;
        int n_on = 0, n_off = 0;
        for (int y = 0; y < image.height; ++y) {
            for (int x = 0; x < image.width; ++x) {
                if (!pixels.at(y, x)) continue;
                if (model::pattern_on(p, x, y)) {
                    on += luminance(image, x, y);
                    ++n_on;
                } else {
                    off += luminance(image, x, y);
                    ++n_off;
                }
            }
        }
        if (n_on == 0 || n_off == 0) continue;
        on /= n_on;
        off /= n_off;
        if (on <= 0) continue;
        const double contrast = (on - off) / on;
        if (contrast > best_contrast) {
            best_contrast = contrast;
            best = p;
        }
    }
    return best;
}

StyleScore region_style_accuracy(const Image& image, const glyph::DepthMap& depth, const BinaryGrid& region,
                                 const TokenList& prompt) {
    if (image.channels < 3 || depth.width != image.width || depth.height != image.height ||
        region.rows != image.height || region.cols != image.width) {
        throw SamplerError(SamplerErrc::ShapeMismatch, "image, depth and region differ in shape");
    }
    StyleScore s;
    const model::Style style = model::style_of(prompt);
    s.expected_color = style.color;
    s.expected_pattern = style.pattern;

    BinaryGrid fg(image.height, image.width);
    double sum[3] = {0, 0, 0};
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            if (!region.at(y, x) || depth.at(x, y) <= 0.0f) continue;
            fg.at(y, x) = 1;
            ++s.pixels;
            for (int c = 0; c < 3; ++c) sum[c] += image.at(x, y, c);
        }
    }
    if (s.pixels == 0) return s;
    s.evaluated = true;
    for (int c = 0; c < 3; ++c) s.mean[c] = static_cast<float>(sum[c] / s.pixels);

    double first = std::numeric_limits<double>::infinity(), second = first;
    for (int k = 0; k < model::kColorCount; ++k) {
        const double d = rgb_distance(s.mean, model::rgb(static_cast<Color>(k)));
        if (d < first) {
            second = first;
            first = d;
            s.color = static_cast<Color>(k);
        } else if (d < second) {
            second = d;
        }
    }
    s.margin = static_cast<float>(second - first);
    s.color_match = !s.expected_color || *s.expected_color == s.color;
    s.pattern = detect_pattern(image, fg);
    s.pattern_match = s.pattern == s.expected_pattern;
    return s;
}

double seam_metric(const Image& image, const BinaryGrid& region) {
    if (region.rows != image.height || region.cols != image.width) {
        throw SamplerError(SamplerErrc::ShapeMismatch, "image and region differ in shape");
    }
    double total = 0;
    long pairs = 0;
    auto edge = [&](int x0, int y0, int x1, int y1) {
        if (region.at(y0, x0) == region.at(y1, x1)) return;
        double d = 0;
        for (int c = 0; c < 3; ++c) {
            const double diff = double(image.at(x0, y0, c)) - image.at(x1, y1, c);
            d += diff * diff;
        }
        total += std::sqrt(d);
        ++pairs;
    };
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            if (x + 1 < image.width) edge(x, y, x + 1, y);
            if (y + 1 < image.height) edge(x, y, x, y + 1);
        }
    }
    return pairs ? total / pairs : 0.0;
}

double psnr(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
        throw SamplerError(SamplerErrc::ShapeMismatch, "images differ in shape");
    }
    double mse = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = double(a.values[i]) - b.values[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.values.size());
    if (mse == 0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

nlohmann::json BenchmarkReport::to_json() const {
    return {{"regional",
             {{"regions", regional_regions},
              {"color_correct", regional_color_correct},
              {"pattern_correct", regional_pattern_correct},
              {"accuracy", regional_accuracy()}}},
            {"global",
             {{"cases", global_cases},
              {"color_correct", global_color_correct},
              {"pattern_correct", global_pattern_correct},
              {"accuracy", global_accuracy()}}},
            {"seconds", seconds}};
}

std::vector<BinaryGrid> split_regions(const glyph::DepthMap& depth, int grid, bool vertical_first) {
    const int patch = depth.width / grid;
    BinaryGrid fg(grid, grid);
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            if (depth.at(x, y) > 0.0f) fg.at(y / patch, x / patch) = 1;
        }
    }
    for (bool vertical : {vertical_first, !vertical_first}) {
        // Cut positions from the middle outward.
        for (int off = 0; off < grid; ++off) {
            for (int cut : {grid / 2 - off, grid / 2 + off}) {
                if (cut < 1 || cut >= grid) continue;
                BinaryGrid a(grid, grid), b(grid, grid);
                bool fa = false, fb = false;
                for (int r = 0; r < grid; ++r) {
                    for (int c = 0; c < grid; ++c) {
                        const bool first = (vertical ? c : r) < cut;
                        (first ? a : b).at(r, c) = 1;
                        if (fg.at(r, c)) (first ? fa : fb) = true;
                    }
                }
                if (fa && fb) return {a, b};
            }
        }
    }
    throw SamplerError(SamplerErrc::MissingRegions, "glyph cannot be split into two non-empty halves");
}

BenchmarkReport run_benchmark(const model::Denoiser<float>& model, const model::GlyphSet& glyphs,
                              const BenchmarkOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const int size = model.config().image_size;
    if (glyphs.size != size || glyphs.glyphs.empty()) {
        throw SamplerError(SamplerErrc::ShapeMismatch, "glyph set does not match the model image size");
    }
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> pick_glyph(0, static_cast<int>(glyphs.glyphs.size()) - 1);
    std::uniform_int_distribution<int> pick_color(0, model::kColorCount - 1);
    std::uniform_int_distribution<int> pick_pattern(0, model::kPatternCount - 1);
    auto background_other_than = [&](std::initializer_list<int> used) {
        std::vector<int> free;
        for (int c = 0; c < model::kColorCount; ++c) {
            if (std::find(used.begin(), used.end(), c) == used.end()) free.push_back(c);
        }
        return free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    };
    auto background_token = [](int c) { return std::string(model::to_string(static_cast<Color>(c))) + "-background"; };
    auto style_tokens = [](int p, int c) {
        return TokenList{model::to_string(static_cast<Pattern>(p)), model::to_string(static_cast<Color>(c))};
    };

    BenchmarkReport report;
    for (int i = 0; i < options.regional_cases; ++i) {
        const glyph::PreparedText& g = glyphs.glyphs[static_cast<std::size_t>(pick_glyph(rng))];
        const int c1 = pick_color(rng);
        int c2 = std::uniform_int_distribution<int>(0, model::kColorCount - 2)(rng);
        if (c2 >= c1) ++c2;
        const int p1 = pick_pattern(rng), p2 = pick_pattern(rng);
        const int bg = background_other_than({c1, c2});
        Conditioning cond;
        cond.base = {background_token(bg)};
        cond.regions = {style_tokens(p1, c1), style_tokens(p2, c2)};
        cond.masks = split_regions(g.depth, model.config().grid(), (i % 2) == 0);
        cond.depth = g.depth;
        const Image image = generate(model, cond, options.seed + 1 + static_cast<std::uint64_t>(i), options.schedule).final_image();
        for (std::size_t k = 0; k < 2; ++k) {
            const StyleScore s = region_style_accuracy(image, g.depth, pixel_union({cond.masks[k]}, size), cond.regions[k]);
            ++report.regional_regions;
            report.regional_color_correct += s.evaluated && s.color_match;
            report.regional_pattern_correct += s.evaluated && s.pattern_match;
        }
    }
    const BinaryGrid everything(size, size, 1);
    for (int i = 0; i < options.global_cases; ++i) {
        const glyph::PreparedText& g = glyphs.glyphs[static_cast<std::size_t>(pick_glyph(rng))];
        const int c = pick_color(rng), p = pick_pattern(rng);
        Conditioning cond;
        cond.base = style_tokens(p, c);
        cond.base.push_back(background_token(background_other_than({c})));
        cond.depth = g.depth;
        const Image image = generate(model, cond, options.seed + 100001 + static_cast<std::uint64_t>(i), options.schedule).final_image();
        const StyleScore s = region_style_accuracy(image, g.depth, everything, cond.base);
        ++report.global_cases;
        report.global_color_correct += s.evaluated && s.color_match;
        report.global_pattern_correct += s.evaluated && s.pattern_match;
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace wordcraft::sampler
