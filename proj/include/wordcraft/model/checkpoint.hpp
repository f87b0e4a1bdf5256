// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"
#include "wordcraft/model/denoiser.hpp"

namespace wordcraft::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// `WCCK`, version, config echo (JSON, plus `metadata`), tensor manifest
/// (name, rows, cols), then every tensor as little-endian float32.
std::vector<std::uint8_t> encode_checkpoint(const Denoiser<float>& model, const nlohmann::json& metadata = {});
Denoiser<float> decode_checkpoint(std::span<const std::uint8_t> bytes, nlohmann::json* metadata = nullptr);

void save_checkpoint(const Denoiser<float>& model, const std::filesystem::path& path, const nlohmann::json& metadata = {});
Denoiser<float> load_checkpoint(const std::filesystem::path& path, nlohmann::json* metadata = nullptr);

}  // namespace wordcraft::model
