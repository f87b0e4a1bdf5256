// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

namespace wordcraft::testing {

inline std::filesystem::path asset(const std::string& rel) { return std::filesystem::path(WORDCRAFT_ASSET_DIR) / rel; }

inline std::filesystem::path test_font() { return asset("fonts/DejaVuSans-Bold-subset.ttf"); }

}  // namespace wordcraft::testing
