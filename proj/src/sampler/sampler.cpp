// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/sampler/sampler.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "wordcraft/attention/errors.hpp"
#include "wordcraft/model/train.hpp"
#include "wordcraft/model/vocabulary.hpp"

namespace wordcraft::sampler {

using attention::BinaryGrid;
using attention::RegionSet;

Latent seeded_noise(std::uint64_t seed, int size) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> normal(0.0f, 1.0f);
    Latent out(static_cast<std::size_t>(size) * size * 3);
    for (float& v : out) v = normal(rng);
    return out;
}

RegionSet resolve(const Conditioning& cond, int grid) {
    if (cond.masks.size() != cond.regions.size()) {
        throw SamplerError(SamplerErrc::ShapeMismatch, "each region needs exactly one mask");
    }
    for (const BinaryGrid& m : cond.masks) {
        if (m.rows != grid || m.cols != grid) {
            throw SamplerError(SamplerErrc::ShapeMismatch, "region mask is " + std::to_string(m.cols) + "x" +
                                                               std::to_string(m.rows) + ", grid is " +
                                                               std::to_string(grid) + "x" + std::to_string(grid));
        }
    }
    try {
        return attention::resolve_regions(cond.masks, grid, grid);
    } catch (const attention::AttentionError& e) {
        if (e.code() == attention::AttentionErrc::OverlappingRegions) {
            throw SamplerError(SamplerErrc::OverlappingRegions, e.what());
        }
        throw SamplerError(SamplerErrc::ShapeMismatch, e.what());
    }
}

namespace {

// Conditioning-dependent state shared by every step of one run.
struct Prepared {
    model::DenoiserInput<float> input;
    std::vector<float> depth_tokens;
    std::optional<attention::SparseMask> mask;
};

void prepare(const model::Denoiser<float>& model, const Conditioning& cond, AttentionPath path, Prepared& p) {
    const model::DenoiserConfig& c = model.config();
    if (cond.depth.width != c.image_size || cond.depth.height != c.image_size ||
        cond.depth.values.size() != static_cast<std::size_t>(c.image_size) * c.image_size) {
        throw SamplerError(SamplerErrc::ShapeMismatch, "depth map does not match the model image size");
    }
    const RegionSet regions = resolve(cond, c.grid());
    p.depth_tokens = model::depth_tokens<float>(cond.depth, c.patch);
    p.input.depth = p.depth_tokens;
    p.input.base = model::StyleVocabulary::ids(cond.base);
    p.input.regions.clear();
    for (const TokenList& r : cond.regions) p.input.regions.push_back(model::StyleVocabulary::ids(r));
    const bool regional = !cond.regions.empty();
    if (path == AttentionPath::dense && regional) {
        throw SamplerError(SamplerErrc::ShapeMismatch, "the dense path cannot honour region masks");
    }
    p.mask.reset();
    if (path == AttentionPath::masked || (path == AttentionPath::automatic && regional)) {
        const attention::TokenLayout layout = model.layout_for(p.input);
        p.mask = attention::compress(attention::assemble_mask(layout, regions, cond.policy));
    }
}

Latent predict_prepared(const model::Denoiser<float>& model, Prepared& p, const Latent& x, float t) {
    const model::DenoiserConfig& c = model.config();
    if (x.size() != static_cast<std::size_t>(c.image_size) * c.image_size * 3) {
        throw SamplerError(SamplerErrc::ShapeMismatch, "latent does not match the model image size");
    }
    const std::vector<float> tokens = model::patchify(x, c.image_size, c.patch, 3);
    p.input.x = tokens;
    p.input.t = t;
    const model::Matrix<float> v = model.forward(p.input, p.mask ? &*p.mask : nullptr);
    const std::vector<float> flat(v.data(), v.data() + v.size());
    return model::unpatchify(flat, c.image_size, c.patch, 3);
}

// Per-pixel region label (0 = background) from per-cell labels.
std::vector<int> pixel_labels(const RegionSet& regions, int size) {
    const int grid = regions.rows();
    const int patch = size / grid;
    std::vector<int> out(static_cast<std::size_t>(size) * size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) out[static_cast<std::size_t>(y) * size + x] = regions.labels[model::cell_of(x, y, patch, grid)];
    }
    return out;
}

// Takes `inside` where the pixel label is non-zero, `outside` elsewhere.
Latent select(const std::vector<int>& labels, const Latent& inside, const Latent& outside) {
    Latent out(outside.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = labels[i / 3] != 0 ? inside[i] : outside[i];
    return out;
}

}  // namespace

Latent predict(const model::Denoiser<float>& model, const Latent& x, float t, const Conditioning& cond, AttentionPath path) {
    Prepared p;
    prepare(model, cond, path, p);
    return predict_prepared(model, p, x, t);
}

Trajectory generate_from(const model::Denoiser<float>& model, const Conditioning& cond, Latent x1, std::uint64_t seed,
                         const Schedule& schedule, AttentionPath path) {
    if (schedule.steps < 1) throw SamplerError(SamplerErrc::ShapeMismatch, "schedule needs at least one step");
    Prepared p;
    prepare(model, cond, path, p);
    Trajectory traj;
    traj.seed = seed;
    traj.schedule = schedule;
    traj.size = model.config().image_size;
    traj.conditioning = cond;
    traj.latents.push_back(std::move(x1));
    for (int i = 0; i < schedule.steps; ++i) {
        Latent v = predict_prepared(model, p, traj.latents.back(), schedule.t(i));
        traj.latents.push_back(euler_step(traj.latents.back(), v, schedule.h(i)));
        traj.predictions.push_back(std::move(v));
    }
    return traj;
}

Trajectory generate(const model::Denoiser<float>& model, const Conditioning& cond, std::uint64_t seed,
                    const Schedule& schedule, AttentionPath path) {
    return generate_from(model, cond, seeded_noise(seed, model.config().image_size), seed, schedule, path);
}

Trajectory invert(const model::Denoiser<float>& model, const Image& image, const glyph::DepthMap& depth,
                  const TokenList& base, const Schedule& schedule, const InvertOptions& options) {
    const int size = model.config().image_size;
    if (image.width != size || image.height != size || image.channels != 3) {
        throw SamplerError(SamplerErrc::ShapeMismatch, "image must be " + std::to_string(size) + "x" +
                                                           std::to_string(size) + " RGB");
    }
    Conditioning cond;
    cond.base = base;
    cond.depth = depth;
    Prepared p;
    prepare(model, cond, AttentionPath::automatic, p);

    Latent next = model::to_latent(image);
    for (int i = schedule.steps - 1; i >= 0; --i) {
        const float t = schedule.t(i), h = schedule.h(i);
        // Solve x + h v(x, t) = next for x.
        Latent guess = euler_step(next, predict_prepared(model, p, next, t), -h);
        Latent best = guess;
        double best_residual = std::numeric_limits<double>::infinity();
        for (int k = 0; k < std::max(1, options.iterations); ++k) {
            const Latent v = predict_prepared(model, p, guess, t);
            double residual = 0;
            for (std::size_t j = 0; j < guess.size(); ++j) {
                const double r = static_cast<double>(guess[j] + h * v[j]) - next[j];
                residual += r * r;
            }
            if (residual < best_residual) {
                best_residual = residual;
                best = guess;
            }
            guess = euler_step(next, v, -h);
        }
        next = std::move(best);
    }
    return generate_from(model, cond, std::move(next), 0, schedule);
}

Latent blend_noise(const Latent& old, const std::vector<Latent>& new_per_region, const RegionSet& regions, int size) {
    if (static_cast<int>(new_per_region.size()) != regions.region_count()) {
        throw SamplerError(SamplerErrc::ShapeMismatch, "need one prediction per region");
    }
    if (old.size() != static_cast<std::size_t>(size) * size * 3 || size % regions.rows() != 0 || regions.rows() != regions.cols()) {
        throw SamplerError(SamplerErrc::ShapeMismatch, "prediction does not match the region grid");
    }
    for (const Latent& n : new_per_region) {
        if (n.size() != old.size()) throw SamplerError(SamplerErrc::ShapeMismatch, "predictions differ in size");
    }
    const std::vector<int> labels = pixel_labels(regions, size);
    Latent out(old.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int k = labels[i / 3];
        out[i] = k == 0 ? old[i] : new_per_region[static_cast<std::size_t>(k - 1)][i];
    }
    return out;
}

namespace {

void check_request(const model::Denoiser<float>& model, const EditRequest& r) {
    if (!r.source) throw SamplerError(SamplerErrc::MissingTrajectory, "edit needs a source trajectory");
    validate(*r.source);
    if (r.source->size != model.config().image_size) {
        throw SamplerError(SamplerErrc::ShapeMismatch, "source trajectory does not match the model image size");
    }
    if (r.masks.empty()) throw SamplerError(SamplerErrc::MissingRegions, "edit needs at least one region");
    if (r.masks.size() != r.prompts.size()) throw SamplerError(SamplerErrc::ShapeMismatch, "each region needs exactly one prompt");
}

Conditioning edit_conditioning(const EditRequest& r) {
    Conditioning c;
    c.base = r.source->conditioning.base;
    c.regions = r.prompts;
    c.masks = r.masks;
    c.depth = r.source->conditioning.depth;
    c.policy = r.source->conditioning.policy;
    return c;
}

}  // namespace

Trajectory edit(const model::Denoiser<float>& model, const EditRequest& request) {
    check_request(model, request);
    const Trajectory& src = *request.source;
    const Schedule& schedule = src.schedule;
    const int size = src.size;
    const Conditioning cond = edit_conditioning(request);
    const RegionSet regions = resolve(cond, model.config().grid());
    const std::vector<int> labels = pixel_labels(regions, size);
    const bool any = regions.background.count() < regions.background.cells.size();

    Prepared joint;
    std::vector<Prepared> single;
    if (any && !request.per_region_passes) {
        prepare(model, cond, AttentionPath::masked, joint);
    } else if (any) {
        for (std::size_t k = 0; k < cond.regions.size(); ++k) {
            Conditioning ck = cond;
            ck.regions = {cond.regions[k]};
            ck.masks = {cond.masks[k]};
            single.emplace_back();
            prepare(model, ck, AttentionPath::masked, single.back());
        }
    }

    Trajectory out;
    out.seed = request.seed;
    out.schedule = schedule;
    out.size = size;
    out.conditioning = cond;
    out.latents.push_back(request.fresh_noise ? select(labels, seeded_noise(request.seed, size), src.latents.front())
                                              : src.latents.front());
    for (int i = 0; i < schedule.steps; ++i) {
        const Latent& x = out.latents.back();
        const Latent& old = src.predictions[static_cast<std::size_t>(i)];
        Latent blended;
        if (!any) {
            blended = old;
        } else if (!request.per_region_passes) {
            const Latent fresh = predict_prepared(model, joint, x, schedule.t(i));
            blended = blend_noise(old, std::vector<Latent>(cond.regions.size(), fresh), regions, size);
        } else {
            std::vector<Latent> fresh;
            for (Prepared& p : single) fresh.push_back(predict_prepared(model, p, x, schedule.t(i)));
            blended = blend_noise(old, fresh, regions, size);
        }
        out.latents.push_back(euler_step(x, blended, schedule.h(i)));
        out.predictions.push_back(std::move(blended));
    }
    return out;
}

Image edit_latent_blend_baseline(const model::Denoiser<float>& model, const EditRequest& request) {
    check_request(model, request);
    const Trajectory& src = *request.source;
    const Conditioning cond = edit_conditioning(request);
    const RegionSet regions = resolve(cond, model.config().grid());
    const std::vector<int> labels = pixel_labels(regions, src.size);
    if (regions.background.count() == regions.background.cells.size()) return src.final_image();
    const Trajectory fresh = generate(model, cond, request.seed, src.schedule, AttentionPath::masked);
    return model::to_image(select(labels, fresh.final_latent(), src.final_latent()), src.size);
}

Image edit_inpaint_baseline(const model::Denoiser<float>& model, const EditRequest& request) {
    check_request(model, request);
    const Trajectory& src = *request.source;
    const Schedule& schedule = src.schedule;
    const Conditioning cond = edit_conditioning(request);
    const RegionSet regions = resolve(cond, model.config().grid());
    const std::vector<int> labels = pixel_labels(regions, src.size);
    const Latent noise = seeded_noise(request.seed, src.size);
    const Latent& target = src.final_latent();
    Prepared p;
    prepare(model, cond, AttentionPath::masked, p);
    Latent x = noise;
    for (int i = 0; i < schedule.steps; ++i) {
        const float t = schedule.t(i);
        Latent renoised(target.size());
        for (std::size_t j = 0; j < target.size(); ++j) renoised[j] = (1.0f - t) * target[j] + t * noise[j];
        x = select(labels, x, renoised);
        x = euler_step(x, predict_prepared(model, p, x, t), schedule.h(i));
    }
    return model::to_image(select(labels, x, target), src.size);
}

BinaryGrid pixel_union(const std::vector<BinaryGrid>& masks, int size) {
    BinaryGrid out(size, size);
    for (const BinaryGrid& m : masks) {
        if (m.rows < 1 || size % m.rows != 0 || size % m.cols != 0) {
            throw SamplerError(SamplerErrc::ShapeMismatch, "mask grid does not divide the image");
        }
        const int ph = size / m.rows, pw = size / m.cols;
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                if (m.at(y / ph, x / pw)) out.at(y, x) = 1;
            }
        }
    }
    return out;
}

Image with_transparent_background(const Image& rgb, const glyph::DepthMap& depth, const std::vector<BinaryGrid>& masks) {
    if (rgb.channels != 3 || depth.width != rgb.width || depth.height != rgb.height || rgb.width != rgb.height) {
        throw SamplerError(SamplerErrc::ShapeMismatch, "image and depth map differ in shape");
    }
    const BinaryGrid regions = pixel_union(masks, rgb.width);
    Image out(rgb.width, rgb.height, 4);
    for (int y = 0; y < rgb.height; ++y) {
        for (int x = 0; x < rgb.width; ++x) {
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = rgb.at(x, y, c);
            out.at(x, y, 3) = (depth.at(x, y) == 0.0f && !regions.at(y, x)) ? 0.0f : 1.0f;
        }
    }
    return out;
}

}  // namespace wordcraft::sampler
