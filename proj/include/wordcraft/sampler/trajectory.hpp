// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wordcraft/attention/mask.hpp"
#include "wordcraft/glyph/depth.hpp"
#include "wordcraft/image.hpp"
#include "wordcraft/model/codec.hpp"

namespace wordcraft::sampler {

using model::Latent;
using TokenList = std::vector<std::string>;

enum class SamplerErrc { ShapeMismatch, OverlappingRegions, MissingTrajectory, BadTrajectory, MissingRegions };

const char* to_string(SamplerErrc code);

class SamplerError : public std::runtime_error {
public:
    SamplerError(SamplerErrc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    SamplerErrc code() const noexcept { return code_; }

private:
    SamplerErrc code_;
};

/// Uniform grid t_i = (n - i) / n from 1 down to 0, stepped with Euler.
struct Schedule {
    int steps = 32;

    float t(int i) const { return static_cast<float>(steps - i) / static_cast<float>(steps); }
    /// t_{i+1} - t_i, negative.
    float h(int i) const { return t(i + 1) - t(i); }
    bool operator==(const Schedule&) const = default;
};

/// x + h * v, elementwise.
Latent euler_step(const Latent& x, const Latent& v, float h);

/// Everything a forward pass is conditioned on besides x_t and t.
struct Conditioning {
    TokenList base;
    std::vector<TokenList> regions;
    std::vector<attention::BinaryGrid> masks;  // latent resolution, one per region
    glyph::DepthMap depth;
    attention::BasePolicy policy = attention::BasePolicy::global;

    bool operator==(const Conditioning&) const = default;
};

/// SHA-256 over the canonical conditioning record and the depth values.
std::string conditioning_digest(const Conditioning& cond);

/// A full sampling run: latents[0..n] (latents[0] at t = 1) and the
/// predictions applied at each step.
struct Trajectory {
    std::uint64_t seed = 0;
    Schedule schedule;
    int size = 0;  // image side in pixels
    std::vector<Latent> latents;
    std::vector<Latent> predictions;
    Conditioning conditioning;

    const Latent& final_latent() const { return latents.back(); }
    Image final_image() const { return model::to_image(latents.back(), size); }
    bool operator==(const Trajectory&) const = default;
};

/// True iff re-stepping the stored predictions reproduces every stored latent bit-exactly.
bool replay_matches(const Trajectory& trajectory);

/// Throws BadTrajectory on inconsistent shapes.
void validate(const Trajectory& trajectory);

inline constexpr std::uint32_t kTrajectoryVersion = 1;

/// `WCTJ`, version, JSON header (schedule, seed, conditioning, digest, shape
/// manifest), then little-endian float32 blobs: depth, latents, predictions.
std::vector<std::uint8_t> encode_trajectory(const Trajectory& trajectory);
Trajectory decode_trajectory(std::span<const std::uint8_t> bytes);

}  // namespace wordcraft::sampler
