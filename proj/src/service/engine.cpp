// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/service/engine.hpp"

#include <openssl/evp.h>

#include <bit>
#include <charconv>
#include <cstring>
#include <random>

#include "wordcraft/attention/regions.hpp"
#include "wordcraft/digest.hpp"
#include "wordcraft/model/checkpoint.hpp"
#include "wordcraft/prompt/lexicon.hpp"
#include "wordcraft/sampler/sampler.hpp"
#include "wordcraft/service/errors.hpp"

namespace wordcraft::service {

using attention::BinaryGrid;
using nlohmann::json;

namespace {

[[noreturn]] void bad_request(const std::string& code, const std::string& what) {
    throw ServiceError(ServiceErrc::BadRequest, what, {{"code", code}});
}

prompt::TokenList expanded(const prompt::TokenList& tokens) {
    return prompt::expand_abstract(tokens, prompt::default_lexicon());
}

}  // namespace

Engine::Engine(model::Denoiser<float> model, std::string checkpoint_digest)
    : model_(std::move(model)), digest_(std::move(checkpoint_digest)) {}

Engine Engine::load(const std::string& checkpoint_path) {
    if (checkpoint_path.empty()) {
        model::Denoiser<float> m(model::DenoiserConfig{});
        m.initialize(m.config().seed);
        const auto bytes = model::encode_checkpoint(m);
        return Engine(std::move(m), sha256_hex(bytes));
    }
    std::vector<std::uint8_t> bytes;
    try {
        bytes = read_file(checkpoint_path);
    } catch (const std::filesystem::filesystem_error& e) {
        throw ServiceError(ServiceErrc::Io, e.what());
    }
    return Engine(model::decode_checkpoint(bytes), sha256_hex(bytes));
}

glyph::PreparedText Engine::prepare(const glyph::Font& font, const std::string& text) const {
    if (text.empty()) bad_request("EmptyCharacter", "no character to render");
    return glyph::prepare_text(font, text, image_size(), kGlyphMargin);
}

std::vector<BinaryGrid> Engine::latent_masks(const std::vector<std::string>& wire) const {
    const int size = image_size(), grid = model_.config().grid();
    std::vector<BinaryGrid> out;
    for (std::size_t k = 0; k < wire.size(); ++k) {
        BinaryGrid m = attention::decode_mask(wire[k]);
        if (m.rows == size && m.cols == size) {
            m = attention::downsample_mask(m, grid, grid);
        } else if (m.rows != grid || m.cols != grid) {
            bad_request("ShapeMismatch", "mask " + std::to_string(k + 1) + " is " + std::to_string(m.cols) + "x" +
                                             std::to_string(m.rows) + "; expected " + std::to_string(size) + "x" +
                                             std::to_string(size) + " or " + std::to_string(grid) + "x" + std::to_string(grid));
        }
        out.push_back(std::move(m));
    }
    json overlaps = json::array();
    for (int cell = 0; cell < grid * grid; ++cell) {
        int owners = 0;
        for (const BinaryGrid& m : out) owners += m.cells[static_cast<std::size_t>(cell)] != 0;
        if (owners > 1) overlaps.push_back({{"row", cell / grid}, {"col", cell % grid}});
    }
    if (!overlaps.empty()) {
        throw ServiceError(ServiceErrc::Conflict,
                           std::to_string(overlaps.size()) + " latent cells belong to more than one region after downsampling",
                           {{"code", "OverlappingRegions"}, {"cells", overlaps}});
    }
    return out;
}

sampler::Conditioning Engine::conditioning(const prompt::PromptBundle& bundle, const glyph::DepthMap& depth,
                                           const std::vector<std::string>& masks) const {
    sampler::Conditioning c;
    c.depth = depth;
    if (bundle.base_prompt) c.base = expanded(*bundle.base_prompt);
    switch (bundle.task) {
        case prompt::TaskType::global:
            if (!masks.empty()) bad_request("RegionOnGlobal", "a global prompt takes no region masks");
            break;
        case prompt::TaskType::multi_regional:
            if (masks.size() != bundle.regions.size()) {
                bad_request("MissingRegions", "the prompt has " + std::to_string(bundle.regions.size()) + " regions but " +
                                                  std::to_string(masks.size()) + " masks were given");
            }
            break;
        case prompt::TaskType::continuous_editing:
            if (!masks.empty() && masks.size() != bundle.regions.size()) {
                bad_request("MissingRegions", "give either no masks or one per prompt region");
            }
            break;
    }
    if (!masks.empty()) {
        c.masks = latent_masks(masks);
        c.regions = bundle_region_prompts(bundle);
    }
    return c;
}

RunOutput Engine::finish(sampler::Trajectory t) const {
    RunOutput out;
    out.image_png = png::encode(t.final_image());
    out.trajectory_bytes = sampler::encode_trajectory(t);
    out.trajectory = std::move(t);
    return out;
}

RunOutput Engine::generate(const prompt::PromptBundle& bundle, const glyph::DepthMap& depth, const GenerateParams& p) const {
    if (p.steps < 1 || p.steps > 1000) bad_request("InvalidSteps", "steps must be in [1, 1000]");
    const sampler::Conditioning c = conditioning(bundle, depth, p.masks);
    return finish(sampler::generate(model_, c, p.seed, sampler::Schedule{p.steps}));
}

RunOutput Engine::edit(const sampler::Trajectory& source, const EditParams& p) const {
    if (p.masks.empty()) bad_request("MissingRegions", "an edit needs at least one region mask");
    if (p.prompts.size() != p.masks.size()) {
        bad_request("MissingRegions", std::to_string(p.masks.size()) + " masks but " + std::to_string(p.prompts.size()) +
                                          " region prompts");
    }
    sampler::EditRequest r;
    r.source = &source;
    r.masks = latent_masks(p.masks);
    for (const auto& tokens : p.prompts) r.prompts.push_back(expanded(tokens));
    r.seed = p.seed;
    return finish(sampler::edit(model_, r));
}

RunOutput Engine::invert(const prompt::PromptBundle& bundle, const glyph::DepthMap& depth, const Image& image, int steps) const {
    if (steps < 1 || steps > 1000) bad_request("InvalidSteps", "steps must be in [1, 1000]");
    if (image.width != image_size() || image.height != image_size()) {
        bad_request("ShapeMismatch", "image must be " + std::to_string(image_size()) + "x" + std::to_string(image_size()));
    }
    Image rgb(image.width, image.height, 3);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = image.at(x, y, image.channels >= 3 ? c : 0);
        }
    }
    const prompt::TokenList base = bundle.base_prompt ? expanded(*bundle.base_prompt) : prompt::TokenList{};
    return finish(sampler::invert(model_, rgb, depth, base, sampler::Schedule{steps}));
}

std::vector<std::uint8_t> Engine::transparent_png(const sampler::Trajectory& trajectory) const {
    return png::encode(sampler::with_transparent_background(trajectory.final_image(), trajectory.conditioning.depth,
                                                            trajectory.conditioning.masks));
}

std::vector<prompt::TokenList> bundle_region_prompts(const prompt::PromptBundle& bundle) {
    std::vector<prompt::TokenList> out;
    for (const auto& r : bundle.regions) out.push_back(expanded(r.prompt));
    return out;
}

std::uint64_t parse_seed(const std::string& text) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
        bad_request("InvalidSeed", "seed '" + text + "' is not an unsigned 64-bit integer");
    }
    return v;
}

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::vector<std::uint8_t> encode_depth(const glyph::DepthMap& depth) {
    std::vector<std::uint8_t> out(8 + depth.values.size() * 4);
    auto put32 = [&](std::size_t at, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
    };
    put32(0, static_cast<std::uint32_t>(depth.width));
    put32(4, static_cast<std::uint32_t>(depth.height));
    for (std::size_t i = 0; i < depth.values.size(); ++i) put32(8 + 4 * i, std::bit_cast<std::uint32_t>(depth.values[i]));
    return out;
}

glyph::DepthMap decode_depth(std::span<const std::uint8_t> bytes) {
    auto get32 = [&](std::size_t at) {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[at + i]) << (8 * i);
        return v;
    };
    if (bytes.size() < 8) throw ServiceError(ServiceErrc::Io, "depth artifact is truncated");
    glyph::DepthMap d;
    d.width = static_cast<int>(get32(0));
    d.height = static_cast<int>(get32(4));
    const std::size_t n = static_cast<std::size_t>(d.width) * static_cast<std::size_t>(d.height);
    if (d.width < 1 || d.height < 1 || bytes.size() != 8 + 4 * n) throw ServiceError(ServiceErrc::Io, "depth artifact is malformed");
    d.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.values[i] = std::bit_cast<float>(get32(8 + 4 * i));
    return d;
}

std::string base64_decode(std::string_view text) {
    if (text.substr(0, 5) == "data:") {
        const auto comma = text.find(',');
        if (comma == std::string_view::npos) bad_request("MalformedMask", "data URL without payload");
        text.remove_prefix(comma + 1);
    }
    std::string clean;
    for (char c : text) {
        if (c != '\n' && c != '\r' && c != ' ') clean += c;
    }
    while (clean.size() % 4 != 0) clean += '=';
    std::string out(clean.size() / 4 * 3, '\0');
    const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()), reinterpret_cast<const unsigned char*>(clean.data()),
                                  static_cast<int>(clean.size()));
    if (n < 0) bad_request("MalformedMask", "invalid base64 payload");
    std::size_t pad = 0;
    for (std::size_t i = clean.size(); i > 0 && clean[i - 1] == '='; --i) ++pad;
    out.resize(static_cast<std::size_t>(n) - std::min<std::size_t>(pad, 2));
    return out;
}

}  // namespace wordcraft::service
