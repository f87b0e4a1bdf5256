// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "wordcraft/prompt/bundle.hpp"

namespace wordcraft::prompt {

/// Parses the structured request mini-language:
///
///     char "W" ; task regions ; base: solid gray ; region 1: stripes red ; region 2: dots blue
///
/// Directives are `;`-separated and may appear in any order. `task` takes
/// `global`, `regions` or `edit`. Whitespace between lexemes is insignificant.
PromptBundle parse_structured(std::string_view text);

/// Canonical mini-language form; parse_structured(serialize_structured(b)) == b.
std::string serialize_structured(const PromptBundle& bundle);

}  // namespace wordcraft::prompt
