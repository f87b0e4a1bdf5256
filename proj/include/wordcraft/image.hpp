// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wordcraft {

class ImageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-major image with interleaved channels, origin at the top-left pixel.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> values;

    Image() = default;
    Image(int w, int h, int c, float fill = 0.0f);

    std::size_t size() const { return values.size(); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }

    float& at(int x, int y, int c = 0) {
        return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    float at(int x, int y, int c = 0) const {
        return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool operator==(const Image&) const = default;
};

/// Clamps every value into [0,1].
Image clamped(Image image);

namespace png {

/// Encodes 1 (gray), 3 (RGB) or 4 (RGBA) channel images. Values are clamped to
/// [0,1] and quantized with round-to-nearest. bit_depth is 8 or 16.
std::vector<std::uint8_t> encode(const Image& image, int bit_depth = 8);

/// Decodes any PNG into floats in [0,1], keeping gray/gray-alpha/RGB/RGBA as stored.
Image decode(std::span<const std::uint8_t> bytes);

}  // namespace png

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace wordcraft
