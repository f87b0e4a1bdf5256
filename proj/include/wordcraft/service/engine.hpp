// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wordcraft/glyph/prepare.hpp"
#include "wordcraft/model/denoiser.hpp"
#include "wordcraft/prompt/bundle.hpp"
#include "wordcraft/sampler/trajectory.hpp"

namespace wordcraft::service {

inline constexpr int kGlyphMargin = 4;
inline constexpr int kMaxCount = 4;

/// A finished sampling run in wire form. The CLI and the HTTP service both
/// write exactly these bytes.
struct RunOutput {
    sampler::Trajectory trajectory;
    std::vector<std::uint8_t> image_png;
    std::vector<std::uint8_t> trajectory_bytes;
};

struct GenerateParams {
    std::uint64_t seed = 0;
    int steps = 32;
    std::vector<std::string> masks;  // wire masks (RLE or PNG bytes), one per bundle region
};

struct EditParams {
    std::uint64_t seed = 0;
    std::vector<std::string> masks;
    std::vector<prompt::TokenList> prompts;
};

/// Model plus the deterministic request pipeline shared by CLI and HTTP.
class Engine {
public:
    Engine(model::Denoiser<float> model, std::string checkpoint_digest);

    /// Loads `path`, or initializes an untrained model when `path` is empty.
    static Engine load(const std::string& checkpoint_path);

    const model::Denoiser<float>& model() const { return model_; }
    const std::string& checkpoint_digest() const { return digest_; }
    int image_size() const { return model_.config().image_size; }

    glyph::PreparedText prepare(const glyph::Font& font, const std::string& text) const;

    /// Wire masks (image or latent resolution) to disjoint latent masks.
    /// Throws Conflict listing overlapping cells.
    std::vector<attention::BinaryGrid> latent_masks(const std::vector<std::string>& wire) const;

    /// Checks task/region agreement and builds the sampler conditioning.
    sampler::Conditioning conditioning(const prompt::PromptBundle& bundle, const glyph::DepthMap& depth,
                                       const std::vector<std::string>& masks) const;

    RunOutput generate(const prompt::PromptBundle& bundle, const glyph::DepthMap& depth, const GenerateParams& p) const;
    RunOutput edit(const sampler::Trajectory& source, const EditParams& p) const;
    /// Inverts an uploaded image under the bundle's base prompt.
    RunOutput invert(const prompt::PromptBundle& bundle, const glyph::DepthMap& depth, const Image& image, int steps) const;

    /// RGBA variant of a run's image with the background made transparent.
    std::vector<std::uint8_t> transparent_png(const sampler::Trajectory& trajectory) const;

private:
    RunOutput finish(sampler::Trajectory t) const;

    model::Denoiser<float> model_;
    std::string digest_;
};

/// Region prompts default to the bundle's when a request leaves them out.
std::vector<prompt::TokenList> bundle_region_prompts(const prompt::PromptBundle& bundle);

/// Parses a decimal seed string; seeds are carried as strings in documents
/// so that all 64 bits survive JSON readers with double-precision numbers.
std::uint64_t parse_seed(const std::string& text);
std::uint64_t entropy_seed();

/// Raw float32 depth blob: width, height, values (little-endian).
std::vector<std::uint8_t> encode_depth(const glyph::DepthMap& depth);
glyph::DepthMap decode_depth(std::span<const std::uint8_t> bytes);

/// Decodes base64 (standard alphabet, padding optional, `data:` URL prefix allowed).
std::string base64_decode(std::string_view text);

}  // namespace wordcraft::service
