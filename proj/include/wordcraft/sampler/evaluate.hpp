// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "wordcraft/attention/regions.hpp"
#include "wordcraft/model/dataset.hpp"
#include "wordcraft/model/denoiser.hpp"
#include "wordcraft/sampler/trajectory.hpp"

namespace wordcraft::sampler {

struct StyleScore {
    bool evaluated = false;  // false when the region holds no foreground pixel
    int pixels = 0;
    model::Rgb mean{};
    std::optional<model::Color> expected_color;
    model::Color color = model::Color::red;
    float margin = 0;  // distance to the second-nearest color minus distance to the nearest
    bool color_match = false;
    model::Pattern expected_pattern = model::Pattern::solid;
    model::Pattern pattern = model::Pattern::solid;
    bool pattern_match = false;
};

/// Nearest vocabulary color of the mean over foreground (depth > 0) pixels of
/// `region` (pixel resolution), plus the procedural pattern detector.
StyleScore region_style_accuracy(const Image& image, const glyph::DepthMap& depth, const attention::BinaryGrid& region,
                                 const TokenList& prompt);

/// Pattern whose on/off template best explains the luminance of `pixels`;
/// solid when no template reaches the contrast threshold.
model::Pattern detect_pattern(const Image& image, const attention::BinaryGrid& pixels);

/// Mean RGB distance across 4-neighbour pixel pairs straddling the boundary of `region`.
double seam_metric(const Image& image, const attention::BinaryGrid& region);

double psnr(const Image& a, const Image& b);

struct BenchmarkOptions {
    int regional_cases = 100;
    int global_cases = 100;
    std::uint64_t seed = 2026;
    Schedule schedule;
};

struct BenchmarkReport {
    int regional_regions = 0;
    int regional_color_correct = 0;
    int regional_pattern_correct = 0;
    int global_cases = 0;
    int global_color_correct = 0;
    int global_pattern_correct = 0;
    double seconds = 0;

    double regional_accuracy() const { return regional_regions ? double(regional_color_correct) / regional_regions : 0.0; }
    double global_accuracy() const { return global_cases ? double(global_color_correct) / global_cases : 0.0; }
    nlohmann::json to_json() const;
};

/// Left/right (or top/bottom) two-region split of the grid chosen so each
/// half holds foreground pixels of `depth`.
std::vector<attention::BinaryGrid> split_regions(const glyph::DepthMap& depth, int grid, bool vertical_first);

/// Seeded two-region and global generations scored with region_style_accuracy.
BenchmarkReport run_benchmark(const model::Denoiser<float>& model, const model::GlyphSet& glyphs,
                              const BenchmarkOptions& options = {});

}  // namespace wordcraft::sampler
