// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace wordcraft {

Image::Image(int w, int h, int c, float fill) : width(w), height(h), channels(c) {
    if (w < 0 || h < 0 || c < 1) {
        throw ImageError("invalid image dimensions");
    }
    values.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c), fill);
}

Image clamped(Image image) {
    for (float& v : image.values) {
        v = std::clamp(v, 0.0f, 1.0f);
    }
    return image;
}

namespace png {

namespace {

png_uint_32 format_for(int channels) {
    switch (channels) {
    case 1: return PNG_FORMAT_GRAY;
    case 2: return PNG_FORMAT_GA;
    case 3: return PNG_FORMAT_RGB;
    case 4: return PNG_FORMAT_RGBA;
    default: throw ImageError("unsupported channel count " + std::to_string(channels));
    }
}

}  // namespace

std::vector<std::uint8_t> encode(const Image& image, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw ImageError("bit depth must be 8 or 16");
    }
    if (image.width <= 0 || image.height <= 0) {
        throw ImageError("cannot encode an empty image");
    }
    png_image info;
    std::memset(&info, 0, sizeof(info));
    info.version = PNG_IMAGE_VERSION;
    info.width = static_cast<png_uint_32>(image.width);
    info.height = static_cast<png_uint_32>(image.height);
    info.format = format_for(image.channels);
    const double scale = bit_depth == 8 ? 255.0 : 65535.0;

    std::vector<std::uint8_t> out;
    png_alloc_size_t size = 0;
    auto quantize = [&](float v) {
        return std::lround(std::clamp(static_cast<double>(v), 0.0, 1.0) * scale);
    };

    if (bit_depth == 8) {
        std::vector<std::uint8_t> pixels(image.size());
        std::transform(image.values.begin(), image.values.end(), pixels.begin(),
                       [&](float v) { return static_cast<std::uint8_t>(quantize(v)); });
        size = PNG_IMAGE_PNG_SIZE_MAX(info);
        out.resize(size);
        if (!png_image_write_to_memory(&info, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
            throw ImageError(std::string("png encode failed: ") + info.message);
        }
    } else {
        // The simplified API treats 16-bit data as linear; PNG_FORMAT_FLAG_LINEAR
        // writes it unchanged with a gAMA chunk of 1.0.
        info.format |= PNG_FORMAT_FLAG_LINEAR;
        std::vector<png_uint_16> pixels(image.size());
        std::transform(image.values.begin(), image.values.end(), pixels.begin(),
                       [&](float v) { return static_cast<png_uint_16>(quantize(v)); });
        size = PNG_IMAGE_PNG_SIZE_MAX(info);
        out.resize(size);
        if (!png_image_write_to_memory(&info, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
            throw ImageError(std::string("png encode failed: ") + info.message);
        }
    }
    out.resize(size);
    return out;
}

Image decode(std::span<const std::uint8_t> bytes) {
    png_image info;
    std::memset(&info, 0, sizeof(info));
    info.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&info, bytes.data(), bytes.size())) {
        throw ImageError(std::string("png decode failed: ") + info.message);
    }
    const bool sixteen = (info.format & PNG_FORMAT_FLAG_LINEAR) != 0;
    int channels = 1;
    if (info.format & PNG_FORMAT_FLAG_COLOR) channels = 3;
    if (info.format & PNG_FORMAT_FLAG_ALPHA) channels += 1;
    info.format = format_for(channels) | (sixteen ? PNG_FORMAT_FLAG_LINEAR : 0);

    Image image(static_cast<int>(info.width), static_cast<int>(info.height), channels);
    if (sixteen) {
        std::vector<png_uint_16> pixels(PNG_IMAGE_SIZE(info) / 2);
        if (!png_image_finish_read(&info, nullptr, pixels.data(), 0, nullptr)) {
            throw ImageError(std::string("png decode failed: ") + info.message);
        }
        std::transform(pixels.begin(), pixels.end(), image.values.begin(),
                       [](png_uint_16 v) { return static_cast<float>(v / 65535.0); });
    } else {
        std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(info));
        if (!png_image_finish_read(&info, nullptr, pixels.data(), 0, nullptr)) {
            throw ImageError(std::string("png decode failed: ") + info.message);
        }
        std::transform(pixels.begin(), pixels.end(), image.values.begin(),
                       [](std::uint8_t v) { return static_cast<float>(v / 255.0); });
    }
    return image;
}

}  // namespace png

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::filesystem::filesystem_error("cannot open file", path, std::make_error_code(std::errc::no_such_file_or_directory));
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::filesystem::filesystem_error("cannot write file", path, std::make_error_code(std::errc::permission_denied));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::filesystem::filesystem_error("short write", path, std::make_error_code(std::errc::io_error));
    }
}

}  // namespace wordcraft
