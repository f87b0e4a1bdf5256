// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace wordcraft::attention {

enum class AttentionErrc {
    IndivisibleDimensions,
    OverlappingRegions,
    LayoutMismatch,
    FullyMaskedRow,
    ShapeMismatch,
    MalformedMask,
};

const char* to_string(AttentionErrc code);

class AttentionError : public std::runtime_error {
public:
    AttentionError(AttentionErrc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    AttentionErrc code() const noexcept { return code_; }

private:
    AttentionErrc code_;
};

}  // namespace wordcraft::attention
