// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "wordcraft/glyph/depth.hpp"
#include "wordcraft/image.hpp"
#include "wordcraft/model/config.hpp"

namespace wordcraft::model {

/// Latents are images in row-major HWC order; the codec between latents and
/// tokens is a pure rearrangement into per-patch vectors.
using Latent = std::vector<float>;

/// HWC image -> [cells][patch*patch*channels], cells row-major over the grid,
/// each patch vector row-major over its pixels with channels interleaved.
template <class T>
std::vector<T> patchify(const std::vector<T>& hwc, int size, int patch, int channels);
template <class T>
std::vector<T> unpatchify(const std::vector<T>& tokens, int size, int patch, int channels);

Latent to_latent(const Image& image);
/// Clamps to [0,1].
Image to_image(const Latent& latent, int size);

/// Grid cell index (row-major) of pixel (x, y).
inline int cell_of(int x, int y, int patch, int grid) { return (y / patch) * grid + x / patch; }

}  // namespace wordcraft::model
