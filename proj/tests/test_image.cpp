// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "wordcraft/image.hpp"

using wordcraft::Image;
namespace png = wordcraft::png;

TEST_CASE("8-bit PNG round-trips quantized values") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> level(0, 255);
    for (int channels : {1, 3, 4}) {
        Image img(7, 5, channels);
        for (float& v : img.values) v = static_cast<float>(level(rng) / 255.0);
        const Image back = png::decode(png::encode(img));
        CHECK(back.channels == channels);
        CHECK(back.width == 7);
        CHECK(back.height == 5);
        CHECK(back == img);
    }
}

TEST_CASE("16-bit gray PNG keeps 16-bit levels") {
    Image img(4, 4, 1);
    for (std::size_t i = 0; i < img.size(); ++i) img.values[i] = static_cast<float>((i * 4099) % 65536 / 65535.0);
    const Image back = png::decode(png::encode(img, 16));
    REQUIRE(back.size() == img.size());
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(back.values[i] == doctest::Approx(img.values[i]).epsilon(1e-6));
}

TEST_CASE("encoding is deterministic and clamps out-of-range values") {
    Image img(3, 3, 3, 1.7f);
    img.values[0] = -2.0f;
    CHECK(png::encode(img) == png::encode(img));
    const Image back = png::decode(png::encode(img));
    CHECK(back.values[0] == 0.0f);
    CHECK(back.values[1] == 1.0f);
}

TEST_CASE("garbage bytes are rejected") {
    const std::vector<std::uint8_t> junk{1, 2, 3, 4};
    CHECK_THROWS_AS(png::decode(junk), wordcraft::ImageError);
}
