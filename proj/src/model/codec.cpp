// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/model/codec.hpp"

#include <algorithm>

namespace wordcraft::model {

namespace {

void check(std::size_t got, int size, int patch, int channels) {
    if (size < 1 || patch < 1 || size % patch != 0 || got != static_cast<std::size_t>(size) * size * channels) {
        throw ModelError(ModelErrc::ShapeMismatch, "expected " + std::to_string(size) + "x" + std::to_string(size) + "x" +
                                                       std::to_string(channels) + " values, got " + std::to_string(got));
    }
}

}  // namespace

template <class T>
std::vector<T> patchify(const std::vector<T>& hwc, int size, int patch, int channels) {
    check(hwc.size(), size, patch, channels);
    const int grid = size / patch;
    std::vector<T> out(hwc.size());
    std::size_t at = 0;
    for (int gy = 0; gy < grid; ++gy) {
        for (int gx = 0; gx < grid; ++gx) {
            for (int py = 0; py < patch; ++py) {
                const std::size_t row = (static_cast<std::size_t>(gy * patch + py) * size + gx * patch) * channels;
                std::copy_n(hwc.begin() + static_cast<std::ptrdiff_t>(row), patch * channels, out.begin() + static_cast<std::ptrdiff_t>(at));
                at += static_cast<std::size_t>(patch) * channels;
            }
        }
    }
    return out;
}

template <class T>
std::vector<T> unpatchify(const std::vector<T>& tokens, int size, int patch, int channels) {
    check(tokens.size(), size, patch, channels);
    const int grid = size / patch;
    std::vector<T> out(tokens.size());
    std::size_t at = 0;
    for (int gy = 0; gy < grid; ++gy) {
        for (int gx = 0; gx < grid; ++gx) {
            for (int py = 0; py < patch; ++py) {
                const std::size_t row = (static_cast<std::size_t>(gy * patch + py) * size + gx * patch) * channels;
                std::copy_n(tokens.begin() + static_cast<std::ptrdiff_t>(at), patch * channels, out.begin() + static_cast<std::ptrdiff_t>(row));
                at += static_cast<std::size_t>(patch) * channels;
            }
        }
    }
    return out;
}

template std::vector<float> patchify(const std::vector<float>&, int, int, int);
template std::vector<double> patchify(const std::vector<double>&, int, int, int);
template std::vector<float> unpatchify(const std::vector<float>&, int, int, int);
template std::vector<double> unpatchify(const std::vector<double>&, int, int, int);

Latent to_latent(const Image& image) {
    if (image.channels != 3 || image.width != image.height) {
        throw ModelError(ModelErrc::ShapeMismatch, "latents need a square 3-channel image");
    }
    return image.values;
}

Image to_image(const Latent& latent, int size) {
    if (latent.size() != static_cast<std::size_t>(size) * size * 3) {
        throw ModelError(ModelErrc::ShapeMismatch, "latent size does not match image size");
    }
    Image img(size, size, 3);
    for (std::size_t i = 0; i < latent.size(); ++i) img.values[i] = std::clamp(latent[i], 0.0f, 1.0f);
    return img;
}

}  // namespace wordcraft::model
