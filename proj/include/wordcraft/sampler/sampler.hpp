// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "wordcraft/attention/regions.hpp"
#include "wordcraft/model/denoiser.hpp"
#include "wordcraft/sampler/trajectory.hpp"

namespace wordcraft::sampler {

/// Seeded standard-normal latent of side `size`.
Latent seeded_noise(std::uint64_t seed, int size);

/// Which attention path a forward pass takes.
enum class AttentionPath {
    automatic,  // dense without regions, masked with regions
    masked,     // always the assembled mask (all ones without regions)
    dense,      // dense; only valid without regions
};

/// One velocity prediction in latent (HWC) layout.
Latent predict(const model::Denoiser<float>& model, const Latent& x, float t, const Conditioning& cond,
               AttentionPath path = AttentionPath::automatic);

/// Resolves `cond.masks` into a region set, throwing OverlappingRegions.
attention::RegionSet resolve(const Conditioning& cond, int grid);

/// Samples from seeded noise at t = 1 down to t = 0, recording every step.
Trajectory generate(const model::Denoiser<float>& model, const Conditioning& cond, std::uint64_t seed,
                    const Schedule& schedule = {}, AttentionPath path = AttentionPath::automatic);

/// Euler run from a given initial latent.
Trajectory generate_from(const model::Denoiser<float>& model, const Conditioning& cond, Latent x1, std::uint64_t seed,
                         const Schedule& schedule, AttentionPath path = AttentionPath::automatic);

struct InvertOptions {
    int iterations = 8;  // fixed-point refinements per step
};

/// Recovers a trajectory whose forward run ends near `image`: each reverse
/// Euler step is solved by fixed-point iteration, then the trajectory is
/// re-run forward from the recovered t = 1 latent so it replays exactly.
Trajectory invert(const model::Denoiser<float>& model, const Image& image, const glyph::DepthMap& depth,
                  const TokenList& base, const Schedule& schedule = {}, const InvertOptions& options = {});

/// Cell-wise combination: cells of region k take new_per_region[k-1], the
/// rest take `old`.
Latent blend_noise(const Latent& old, const std::vector<Latent>& new_per_region, const attention::RegionSet& regions,
                   int size);

struct EditRequest {
    const Trajectory* source = nullptr;
    std::vector<attention::BinaryGrid> masks;  // latent resolution
    std::vector<TokenList> prompts;
    std::uint64_t seed = 0;
    /// Fresh noise inside the edited cells at t = 1; otherwise inherit the source's.
    bool fresh_noise = true;
    /// One forward pass per region instead of a single regional pass.
    bool per_region_passes = false;
};

/// Continuous editing: cells outside the edit regions follow the source
/// trajectory exactly; cells inside are re-generated under their prompts.
Trajectory edit(const model::Denoiser<float>& model, const EditRequest& request);

/// Baseline: generate the regions from fresh noise independently, then
/// composite the final latents.
Image edit_latent_blend_baseline(const model::Denoiser<float>& model, const EditRequest& request);

/// Baseline: regenerate everything, replacing cells outside the regions by the
/// re-noised source image before every step.
Image edit_inpaint_baseline(const model::Denoiser<float>& model, const EditRequest& request);

/// Pixel-resolution union of the latent masks.
attention::BinaryGrid pixel_union(const std::vector<attention::BinaryGrid>& masks, int size);

/// RGBA copy with background pixels (depth 0 and outside every region) transparent.
Image with_transparent_background(const Image& rgb, const glyph::DepthMap& depth,
                                  const std::vector<attention::BinaryGrid>& masks);

}  // namespace wordcraft::sampler
