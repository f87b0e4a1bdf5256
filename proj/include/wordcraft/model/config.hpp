// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace wordcraft::model {

enum class ModelErrc { ShapeMismatch, DivergenceDetected, BadCheckpoint, InvalidConfig };

const char* to_string(ModelErrc code);

class ModelError : public std::runtime_error {
public:
    ModelError(ModelErrc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ModelErrc code() const noexcept { return code_; }

private:
    ModelErrc code_;
};

struct DenoiserConfig {
    int image_size = 64;
    int patch = 8;
    int dim = 64;
    int heads = 4;
    int layers = 3;
    int ffn_mult = 4;
    int time_dim = 64;
    std::uint64_t seed = 1;

    int grid() const { return image_size / patch; }
    int cells() const { return grid() * grid(); }
    int image_patch_dim() const { return patch * patch * 3; }
    int depth_patch_dim() const { return patch * patch; }
    int head_dim() const { return dim / heads; }

    /// Throws InvalidConfig on non-divisible sizes.
    void validate() const;
    nlohmann::json to_json() const;
    static DenoiserConfig from_json(const nlohmann::json& j);
    bool operator==(const DenoiserConfig&) const = default;
};

}  // namespace wordcraft::model
