// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/sampler/trajectory.hpp"

#include <bit>
#include <cstring>

#include "json.hpp"
#include "wordcraft/digest.hpp"

namespace wordcraft::sampler {

using nlohmann::json;

const char* to_string(SamplerErrc code) {
    switch (code) {
        case SamplerErrc::ShapeMismatch: return "ShapeMismatch";
        case SamplerErrc::OverlappingRegions: return "OverlappingRegions";
        case SamplerErrc::MissingTrajectory: return "MissingTrajectory";
        case SamplerErrc::BadTrajectory: return "BadTrajectory";
        case SamplerErrc::MissingRegions: return "MissingRegions";
    }
    return "?";
}

Latent euler_step(const Latent& x, const Latent& v, float h) {
    if (x.size() != v.size()) throw SamplerError(SamplerErrc::ShapeMismatch, "latent and prediction differ in size");
    Latent out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + h * v[i];
    return out;
}

namespace {

const char* policy_name(attention::BasePolicy p) {
    return p == attention::BasePolicy::global ? "global" : "background_only";
}

json conditioning_json(const Conditioning& c) {
    json masks = json::array();
    for (const auto& m : c.masks) masks.push_back(attention::encode_rle(m));
    return {{"base", c.base},
            {"regions", c.regions},
            {"masks", masks},
            {"policy", policy_name(c.policy)},
            {"depth", {c.depth.width, c.depth.height}}};
}

Conditioning conditioning_from_json(const json& j) {
    Conditioning c;
    c.base = j.at("base").get<TokenList>();
    c.regions = j.at("regions").get<std::vector<TokenList>>();
    for (const auto& m : j.at("masks")) c.masks.push_back(attention::decode_rle(m.get<std::string>()));
    const std::string policy = j.at("policy").get<std::string>();
    if (policy == "global") c.policy = attention::BasePolicy::global;
    else if (policy == "background_only") c.policy = attention::BasePolicy::background_only;
    else throw SamplerError(SamplerErrc::BadTrajectory, "unknown base policy " + policy);
    c.depth.width = j.at("depth").at(0).get<int>();
    c.depth.height = j.at("depth").at(1).get<int>();
    if (c.regions.size() != c.masks.size()) throw SamplerError(SamplerErrc::BadTrajectory, "region prompts and masks differ in count");
    return c;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_floats(std::vector<std::uint8_t>& out, const std::vector<float>& values) {
    for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

}  // namespace

std::string conditioning_digest(const Conditioning& cond) {
    std::vector<std::uint8_t> bytes;
    const std::string header = conditioning_json(cond).dump();
    bytes.assign(header.begin(), header.end());
    put_floats(bytes, cond.depth.values);
    return sha256_hex(bytes);
}

void validate(const Trajectory& t) {
    auto fail = [](const std::string& why) { throw SamplerError(SamplerErrc::BadTrajectory, why); };
    if (t.schedule.steps < 1) fail("schedule needs at least one step");
    if (t.latents.size() != static_cast<std::size_t>(t.schedule.steps) + 1) fail("latent count must be steps + 1");
    if (t.predictions.size() != static_cast<std::size_t>(t.schedule.steps)) fail("prediction count must equal steps");
    const std::size_t n = static_cast<std::size_t>(t.size) * t.size * 3;
    for (const auto& l : t.latents) {
        if (l.size() != n) fail("latent has the wrong size");
    }
    for (const auto& p : t.predictions) {
        if (p.size() != n) fail("prediction has the wrong size");
    }
    const auto& d = t.conditioning.depth;
    if (d.width != t.size || d.height != t.size || d.values.size() != static_cast<std::size_t>(t.size) * t.size) {
        fail("depth map does not match the image size");
    }
    if (t.conditioning.regions.size() != t.conditioning.masks.size()) fail("region prompts and masks differ in count");
}

bool replay_matches(const Trajectory& t) {
    validate(t);
    Latent x = t.latents.front();
    for (int i = 0; i < t.schedule.steps; ++i) {
        x = euler_step(x, t.predictions[static_cast<std::size_t>(i)], t.schedule.h(i));
        if (std::memcmp(x.data(), t.latents[static_cast<std::size_t>(i) + 1].data(), x.size() * sizeof(float)) != 0) return false;
    }
    return true;
}

std::vector<std::uint8_t> encode_trajectory(const Trajectory& t) {
    validate(t);
    const json header = {
        {"schedule", {{"steps", t.schedule.steps}, {"grid", "uniform"}, {"solver", "euler"}}},
        {"seed", std::to_string(t.seed)},
        {"size", t.size},
        {"conditioning", conditioning_json(t.conditioning)},
        {"conditioning_digest", conditioning_digest(t.conditioning)},
        {"blobs",
         {{{"name", "depth"}, {"shape", {t.size, t.size}}},
          {{"name", "latents"}, {"shape", {t.schedule.steps + 1, t.size, t.size, 3}}},
          {{"name", "predictions"}, {"shape", {t.schedule.steps, t.size, t.size, 3}}}}},
    };
    std::vector<std::uint8_t> out = {'W', 'C', 'T', 'J'};
    put_u32(out, kTrajectoryVersion);
    const std::string h = header.dump();
    put_u32(out, static_cast<std::uint32_t>(h.size()));
    out.insert(out.end(), h.begin(), h.end());
    put_floats(out, t.conditioning.depth.values);
    for (const auto& l : t.latents) put_floats(out, l);
    for (const auto& p : t.predictions) put_floats(out, p);
    return out;
}

Trajectory decode_trajectory(std::span<const std::uint8_t> bytes) {
    auto fail = [](const std::string& why) -> void { throw SamplerError(SamplerErrc::BadTrajectory, why); };
    std::size_t at = 0;
    auto u32 = [&]() {
        if (bytes.size() - at < 4) fail("truncated trajectory");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[at + i]) << (8 * i);
        at += 4;
        return v;
    };
    auto floats = [&](std::size_t n) {
        if ((bytes.size() - at) / 4 < n) fail("truncated trajectory blob");
        std::vector<float> v(n);
        for (float& f : v) f = std::bit_cast<float>(u32());
        return v;
    };
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "WCTJ", 4) != 0) fail("not a trajectory (bad magic)");
    at = 4;
    if (const std::uint32_t version = u32(); version != kTrajectoryVersion) fail("unsupported trajectory version " + std::to_string(version));
    const std::uint32_t hlen = u32();
    if (bytes.size() - at < hlen) fail("truncated trajectory header");
    Trajectory t;
    std::string digest;
    try {
        const json header = json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(at), bytes.begin() + static_cast<std::ptrdiff_t>(at + hlen));
        t.schedule.steps = header.at("schedule").at("steps").get<int>();
        t.seed = std::stoull(header.at("seed").get<std::string>());
        t.size = header.at("size").get<int>();
        t.conditioning = conditioning_from_json(header.at("conditioning"));
        digest = header.at("conditioning_digest").get<std::string>();
    } catch (const SamplerError&) {
        throw;
    } catch (const std::exception& e) {
        fail(std::string("bad trajectory header: ") + e.what());
    }
    at += hlen;
    if (t.size < 1 || t.size > 4096 || t.schedule.steps < 1 || t.schedule.steps > 100000) fail("implausible trajectory shape");
    if (t.conditioning.depth.width != t.size || t.conditioning.depth.height != t.size) fail("depth shape does not match size");
    const std::size_t n = static_cast<std::size_t>(t.size) * t.size * 3;
    t.conditioning.depth.values = floats(static_cast<std::size_t>(t.size) * t.size);
    for (int i = 0; i <= t.schedule.steps; ++i) t.latents.push_back(floats(n));
    for (int i = 0; i < t.schedule.steps; ++i) t.predictions.push_back(floats(n));
    if (at != bytes.size()) fail("trailing bytes after trajectory blobs");
    if (conditioning_digest(t.conditioning) != digest) fail("conditioning digest mismatch");
    validate(t);
    return t;
}

}  // namespace wordcraft::sampler
