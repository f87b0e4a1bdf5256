// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "wordcraft/model/dataset.hpp"
#include "wordcraft/sampler/evaluate.hpp"
#include "wordcraft/sampler/sampler.hpp"

using namespace wordcraft;
using namespace wordcraft::sampler;
using attention::BinaryGrid;
using model::Color;
using model::Pattern;

namespace {

model::DenoiserConfig small_config() {
    model::DenoiserConfig c;
    c.image_size = 32;
    c.patch = 4;
    c.dim = 16;
    c.heads = 2;
    c.layers = 2;
    c.time_dim = 16;
    return c;
}

const model::Denoiser<float>& random_model() {
    static const model::Denoiser<float> m = [] {
        model::Denoiser<float> d(small_config());
        d.randomize(7, 0.15f);
        return d;
    }();
    return m;
}

const glyph::Font& font() {
    static const glyph::Font f = glyph::Font::from_file(testing::test_font());
    return f;
}

glyph::DepthMap depth_of(const std::string& text, int size) {
    return model::GlyphSet::build(font(), {text}, size).glyphs[0].depth;
}

Conditioning global_cond(int size) {
    Conditioning c;
    c.base = {"solid", "red", "gray-background"};
    c.depth = depth_of("A", size);
    return c;
}

BinaryGrid random_mask(int grid, std::mt19937_64& rng, double p) {
    std::bernoulli_distribution on(p);
    BinaryGrid m(grid, grid);
    for (auto& c : m.cells) c = on(rng);
    return m;
}

// Splits one random mask into `n` disjoint ones by a random label per set cell.
std::vector<BinaryGrid> random_regions(int grid, int n, std::mt19937_64& rng) {
    const BinaryGrid any = random_mask(grid, rng, 0.5);
    std::vector<BinaryGrid> out(n, BinaryGrid(grid, grid));
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (std::size_t i = 0; i < any.cells.size(); ++i) {
        if (any.cells[i]) out[static_cast<std::size_t>(pick(rng))].cells[i] = 1;
    }
    return out;
}

// Pixels (as latent values) of cells outside every mask.
bool equal_outside(const Latent& a, const Latent& b, const std::vector<BinaryGrid>& masks, int size) {
    const BinaryGrid inside = pixel_union(masks, size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            if (inside.at(y, x)) continue;
            for (int c = 0; c < 3; ++c) {
                const std::size_t i = (static_cast<std::size_t>(y) * size + x) * 3 + c;
                if (std::memcmp(&a[i], &b[i], sizeof(float)) != 0) return false;
            }
        }
    }
    return true;
}

SamplerErrc error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const SamplerError& e) {
        return e.code();
    }
    FAIL("expected SamplerError");
    return SamplerErrc::BadTrajectory;
}

const std::vector<TokenList> kGreen = {{"solid", "green"}};

}  // namespace

TEST_CASE("schedule runs from exactly 1 to exactly 0") {
    for (int n : {1, 7, 32, 50}) {
        const Schedule s{n};
        CHECK(s.t(0) == 1.0f);
        CHECK(s.t(n) == 0.0f);
        double total = 0;
        for (int i = 0; i < n; ++i) {
            CHECK(s.t(i + 1) < s.t(i));
            CHECK(s.h(i) < 0.0f);
            total += s.h(i);
        }
        CHECK(total == doctest::Approx(-1.0).epsilon(1e-6));
    }
}

TEST_CASE("generation is deterministic and replays exactly") {
    const auto& m = random_model();
    const Conditioning cond = global_cond(32);
    const Trajectory a = generate(m, cond, 42);
    const Trajectory b = generate(m, cond, 42);
    CHECK(a == b);
    CHECK(a.latents.size() == 33u);
    CHECK(a.predictions.size() == 32u);
    CHECK(a.latents[0] == seeded_noise(42, 32));
    CHECK(replay_matches(a));
    CHECK(generate(m, cond, 43).final_latent() != a.final_latent());
    CHECK(a.final_image().channels == 3);

    Trajectory broken = a;
    broken.latents[5][17] += 1e-6f;
    CHECK_FALSE(replay_matches(broken));
    broken.predictions.pop_back();
    CHECK(error_of([&] { validate(broken); }) == SamplerErrc::BadTrajectory);
}

TEST_CASE("regional generation rejects overlapping or mismatched masks") {
    const auto& m = random_model();
    Conditioning cond = global_cond(32);
    cond.base = {"gray-background"};
    cond.regions = {{"solid", "red"}, {"dots", "blue"}};
    BinaryGrid left(8, 8), right(8, 8);
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) (c < 4 ? left : right).at(r, c) = 1;
    }
    cond.masks = {left, right};
    CHECK(replay_matches(generate(m, cond, 1)));
    CHECK(error_of([&] { generate(m, cond, 1, {}, AttentionPath::dense); }) == SamplerErrc::ShapeMismatch);
    cond.masks = {left, left};
    CHECK(error_of([&] { generate(m, cond, 1); }) == SamplerErrc::OverlappingRegions);
    cond.masks = {left};
    CHECK(error_of([&] { generate(m, cond, 1); }) == SamplerErrc::ShapeMismatch);
    cond.masks = {BinaryGrid(4, 4), right};
    CHECK(error_of([&] { generate(m, cond, 1); }) == SamplerErrc::ShapeMismatch);
}

TEST_CASE("automatic path without regions matches the masked path closely") {
    const auto& m = random_model();
    const Conditioning cond = global_cond(32);
    const Latent x = seeded_noise(5, 32);
    const Latent dense = predict(m, x, 0.5f, cond, AttentionPath::automatic);
    const Latent masked = predict(m, x, 0.5f, cond, AttentionPath::masked);
    double worst = 0, scale = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        worst = std::max(worst, double(std::abs(dense[i] - masked[i])));
        scale = std::max(scale, double(std::abs(dense[i])));
    }
    CHECK(worst <= 1e-5 * scale);
}

TEST_CASE("trajectory files round trip and detect corruption") {
    const auto& m = random_model();
    Conditioning cond = global_cond(32);
    cond.base = {"gray-background"};
    cond.regions = {{"stripes", "blue"}};
    std::mt19937_64 rng(3);
    cond.masks = {random_mask(8, rng, 0.4)};
    cond.policy = attention::BasePolicy::background_only;
    const Trajectory t = generate(m, cond, 0xFFFFFFFFFFFFFFF1ull, Schedule{6});
    const auto bytes = encode_trajectory(t);
    const Trajectory back = decode_trajectory(bytes);
    CHECK(back == t);
    CHECK(encode_trajectory(back) == bytes);

    auto bad = bytes;
    bad[bad.size() - 3] ^= 0x40;
    CHECK(decode_trajectory(bad) != t);  // blobs are raw floats; the digest covers conditioning
    auto truncated = bytes;
    truncated.resize(bytes.size() / 2);
    CHECK(error_of([&] { decode_trajectory(truncated); }) == SamplerErrc::BadTrajectory);
    auto magic = bytes;
    magic[1] = 'X';
    CHECK(error_of([&] { decode_trajectory(magic); }) == SamplerErrc::BadTrajectory);
}

TEST_CASE("blend_noise follows the masked combination") {
    // 2x2 image, 2x2 grid: one pixel per cell.
    BinaryGrid second(2, 2);
    second.cells[1] = 1;
    const auto regions = attention::resolve_regions({second});
    const Latent old = {1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4};
    const Latent fresh = {10, 10, 10, 20, 20, 20, 30, 30, 30, 40, 40, 40};
    CHECK(blend_noise(old, {fresh}, regions, 2) == Latent{1, 1, 1, 20, 20, 20, 3, 3, 3, 4, 4, 4});

    const auto none = attention::resolve_regions({}, 2, 2);
    CHECK(blend_noise(old, {}, none, 2) == old);
    const auto all = attention::resolve_regions({BinaryGrid(2, 2, 1)});
    CHECK(blend_noise(old, {fresh}, all, 2) == fresh);
    CHECK_THROWS_AS(blend_noise(old, {fresh, fresh}, regions, 2), SamplerError);
    CHECK_THROWS_AS(blend_noise(Latent(5), {fresh}, regions, 2), SamplerError);
}

TEST_CASE("blend_noise is idempotent when the new prediction equals the old") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const auto masks = random_regions(8, 1 + trial % 3, rng);
        const auto regions = attention::resolve_regions(masks);
        const Latent old = seeded_noise(trial, 32);
        const std::vector<Latent> same(masks.size(), old);
        CHECK(blend_noise(old, same, regions, 32) == old);
    }
}

TEST_CASE("edit with an empty mask reproduces the source bit for bit") {
    const auto& m = random_model();
    const Trajectory src = generate(m, global_cond(32), 11);
    EditRequest req{&src, {BinaryGrid(8, 8)}, kGreen, 99};
    const Trajectory out = edit(m, req);
    CHECK(out.latents == src.latents);
    CHECK(out.predictions == src.predictions);
    CHECK(out.final_image() == src.final_image());
    CHECK(edit_latent_blend_baseline(m, req) == src.final_image());
    CHECK(replay_matches(out));
}

TEST_CASE("edit with a full mask equals a fresh regional generation") {
    const auto& m = random_model();
    const Trajectory src = generate(m, global_cond(32), 12);
    const EditRequest req{&src, {BinaryGrid(8, 8, 1)}, kGreen, 77};
    const Trajectory out = edit(m, req);
    Conditioning cond = src.conditioning;
    cond.regions = kGreen;
    cond.masks = req.masks;
    const Trajectory fresh = generate(m, cond, 77);
    CHECK(out.latents == fresh.latents);
    CHECK(out.final_image() == fresh.final_image());
}

TEST_CASE("edits leave every cell outside the regions on the source trajectory") {
    const auto& m = random_model();
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 12; ++trial) {
        const Trajectory src = generate(m, global_cond(32), 100 + trial, Schedule{8});
        const int n = 1 + trial % 3;
        EditRequest req{&src, random_regions(8, n, rng), {}, static_cast<std::uint64_t>(trial)};
        for (int k = 0; k < n; ++k) req.prompts.push_back({"dots", k % 2 ? "blue" : "green"});
        req.per_region_passes = trial % 4 == 3;
        req.fresh_noise = trial % 5 != 4;
        const Trajectory out = edit(m, req);
        REQUIRE(out.latents.size() == src.latents.size());
        for (std::size_t i = 0; i < out.latents.size(); ++i) CHECK(equal_outside(out.latents[i], src.latents[i], req.masks, 32));
        CHECK(replay_matches(out));
    }
}

TEST_CASE("fresh noise is injected only inside the regions") {
    const auto& m = random_model();
    const Trajectory src = generate(m, global_cond(32), 21, Schedule{4});
    std::mt19937_64 rng(22);
    EditRequest req{&src, random_regions(8, 1, rng), kGreen, 5};
    const Latent noise = seeded_noise(5, 32);
    const BinaryGrid inside = pixel_union(req.masks, 32);
    const Trajectory out = edit(m, req);
    for (int p = 0; p < 32 * 32; ++p) {
        const Latent& expect = inside.cells[static_cast<std::size_t>(p)] ? noise : src.latents[0];
        for (int c = 0; c < 3; ++c) CHECK(out.latents[0][p * 3 + c] == expect[p * 3 + c]);
    }
    req.fresh_noise = false;
    CHECK(edit(m, req).latents[0] == src.latents[0]);
}

TEST_CASE("sequential edits on disjoint regions commute outside both") {
    const auto& m = random_model();
    std::mt19937_64 rng(31);
    const std::vector<TokenList> blue = {{"stripes", "blue"}};
    for (int trial = 0; trial < 4; ++trial) {
        const Trajectory s = generate(m, global_cond(32), 300 + trial, Schedule{8});
        const auto pair = random_regions(8, 2, rng);
        const std::vector<BinaryGrid> a = {pair[0]}, b = {pair[1]};
        const Trajectory sa = edit(m, {&s, a, kGreen, 1});
        const Trajectory sab = edit(m, {&sa, b, blue, 2});
        const Trajectory sb = edit(m, {&s, b, blue, 2});
        const Trajectory sba = edit(m, {&sb, a, kGreen, 1});
        CHECK(equal_outside(sab.final_latent(), s.final_latent(), pair, 32));
        CHECK(equal_outside(sba.final_latent(), s.final_latent(), pair, 32));
        CHECK(equal_outside(sab.final_latent(), sba.final_latent(), pair, 32));
    }
}

TEST_CASE("iterative refinement keeps the outside of the region") {
    const auto& m = random_model();
    std::mt19937_64 rng(41);
    const Trajectory s = generate(m, global_cond(32), 400, Schedule{8});
    const auto region = random_regions(8, 1, rng);
    const Trajectory once = edit(m, {&s, region, kGreen, 3});
    const Trajectory twice = edit(m, {&once, region, {{"checker", "gray"}}, 4});
    validate(twice);
    CHECK(replay_matches(twice));
    CHECK(equal_outside(twice.final_latent(), s.final_latent(), region, 32));
    CHECK(twice.conditioning.regions[0] == TokenList{"checker", "gray"});
}

TEST_CASE("edit request errors") {
    const auto& m = random_model();
    const Trajectory s = generate(m, global_cond(32), 1, Schedule{2});
    CHECK(error_of([&] { edit(m, {nullptr, {BinaryGrid(8, 8)}, kGreen, 0}); }) == SamplerErrc::MissingTrajectory);
    CHECK(error_of([&] { edit(m, {&s, {}, {}, 0}); }) == SamplerErrc::MissingRegions);
    CHECK(error_of([&] { edit(m, {&s, {BinaryGrid(8, 8, 1), BinaryGrid(8, 8, 1)}, {kGreen[0], kGreen[0]}, 0}); }) ==
          SamplerErrc::OverlappingRegions);
    CHECK(error_of([&] { edit(m, {&s, {BinaryGrid(8, 8)}, {}, 0}); }) == SamplerErrc::ShapeMismatch);
}

TEST_CASE("inversion is deterministic and replays exactly") {
    const auto& m = random_model();
    const Conditioning cond = global_cond(32);
    const Image image = generate(m, cond, 55, Schedule{8}).final_image();
    const Trajectory a = invert(m, image, cond.depth, cond.base, Schedule{8});
    const Trajectory b = invert(m, image, cond.depth, cond.base, Schedule{8});
    CHECK(a == b);
    CHECK(replay_matches(a));
    CHECK(a.conditioning.base == cond.base);
    CHECK(error_of([&] { invert(m, Image(16, 16, 3), cond.depth, cond.base); }) == SamplerErrc::ShapeMismatch);
}

TEST_CASE("inverting a zero image under a zero field gives zero predictions") {
    const model::Denoiser<float> zero(small_config());  // all parameters zero
    const Conditioning cond = global_cond(32);
    const Trajectory t = invert(zero, Image(32, 32, 3), cond.depth, cond.base, Schedule{6});
    for (const Latent& v : t.predictions) CHECK(std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; }));
    for (const Latent& x : t.latents) CHECK(std::all_of(x.begin(), x.end(), [](float v) { return v == 0.0f; }));
    CHECK(replay_matches(t));
    CHECK(t.final_image() == Image(32, 32, 3));
}

TEST_CASE("inpainting baseline differs from the edit inside the region") {
    const auto& m = random_model();
    std::mt19937_64 rng(61);
    const Trajectory s = generate(m, global_cond(32), 500, Schedule{8});
    const EditRequest req{&s, random_regions(8, 1, rng), kGreen, 6};
    const Image ours = edit(m, req).final_image();
    const Image inp = edit_inpaint_baseline(m, req);
    const Image blend = edit_latent_blend_baseline(m, req);
    const BinaryGrid inside = pixel_union(req.masks, 32);
    bool differs = false;
    for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) {
            for (int c = 0; c < 3; ++c) {
                if (inside.at(y, x)) differs = differs || ours.at(x, y, c) != inp.at(x, y, c);
                else CHECK(blend.at(x, y, c) == s.final_image().at(x, y, c));
            }
        }
    }
    CHECK(differs);
}

TEST_CASE("region style accuracy on rendered styles") {
    const glyph::DepthMap depth = depth_of("W", 64);
    const BinaryGrid all(64, 64, 1);
    const StyleScore red = region_style_accuracy(model::render_styled(depth, Pattern::solid, Color::red, Color::gray), depth,
                                                 all, {"solid", "red"});
    CHECK(red.evaluated);
    CHECK(red.color_match);
    CHECK(red.pattern_match);
    CHECK(red.margin > 0.2f);

    Image gray(64, 64, 3, 0.5f);
    CHECK(region_style_accuracy(gray, depth, all, {"gray"}).color_match);

    Image blue(64, 64, 3, 0.0f);
    for (int p = 0; p < 64 * 64; ++p) blue.values[static_cast<std::size_t>(p) * 3 + 2] = 1.0f;
    const StyleScore wrong = region_style_accuracy(blue, depth, all, {"red"});
    CHECK_FALSE(wrong.color_match);
    CHECK(wrong.color == Color::blue);

    const StyleScore empty = region_style_accuracy(gray, depth, BinaryGrid(64, 64), {"gray"});
    CHECK_FALSE(empty.evaluated);
    CHECK(empty.pixels == 0);
}

TEST_CASE("pattern detector recovers every rendered style") {
    const glyph::DepthMap depth = depth_of("M", 64);
    for (int p = 0; p < model::kPatternCount; ++p) {
        for (int c = 0; c < model::kColorCount; ++c) {
            const auto pattern = static_cast<Pattern>(p);
            const auto color = static_cast<Color>(c);
            const Image img = model::render_styled(depth, pattern, color, static_cast<Color>((c + 1) % 4));
            const StyleScore s = region_style_accuracy(img, depth, BinaryGrid(64, 64, 1), {model::to_string(pattern), model::to_string(color)});
            INFO(model::to_string(pattern) << " " << model::to_string(color));
            CHECK(s.color_match);
            CHECK(s.pattern == pattern);
        }
    }
}

TEST_CASE("seam metric and psnr") {
    Image img(8, 8, 3, 0.0f);
    BinaryGrid left(8, 8);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 4; ++x) {
            left.at(y, x) = 1;
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = 1.0f;
        }
    }
    CHECK(seam_metric(img, left) == doctest::Approx(std::sqrt(3.0)));
    CHECK(seam_metric(Image(8, 8, 3, 0.3f), left) == 0.0);
    CHECK(std::isinf(psnr(img, img)));
    Image off = img;
    for (float& v : off.values) v += 0.1f;
    CHECK(psnr(img, off) == doctest::Approx(20.0).epsilon(1e-4));
}

TEST_CASE("split regions give two foreground halves") {
    for (const char* text : {"I", "A", "OK", "L"}) {
        const glyph::DepthMap depth = depth_of(text, 64);
        for (bool vertical : {true, false}) {
            const auto halves = split_regions(depth, 8, vertical);
            REQUIRE(halves.size() == 2u);
            CHECK_NOTHROW(attention::resolve_regions(halves));
            for (const auto& h : halves) CHECK(region_style_accuracy(model::render_styled(depth, Pattern::solid, Color::red, Color::gray), depth,
                                                                     pixel_union({h}, 64), {"red"})
                                                   .evaluated);
        }
    }
    CHECK(error_of([] { split_regions(glyph::DepthMap{64, 64, std::vector<float>(64 * 64, 0.0f)}, 8, true); }) ==
          SamplerErrc::MissingRegions);
}

TEST_CASE("transparent background keeps glyph and region pixels") {
    glyph::DepthMap depth{32, 32, std::vector<float>(32 * 32, 0.0f)};
    depth.values[5 * 32 + 5] = 0.7f;
    BinaryGrid region(8, 8);
    region.at(7, 7) = 1;
    const Image rgba = with_transparent_background(Image(32, 32, 3, 0.4f), depth, {region});
    CHECK(rgba.channels == 4);
    CHECK(rgba.at(5, 5, 3) == 1.0f);
    CHECK(rgba.at(30, 30, 3) == 1.0f);
    CHECK(rgba.at(0, 0, 3) == 0.0f);
    CHECK(rgba.at(0, 0, 1) == 0.4f);
}
