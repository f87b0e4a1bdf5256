// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "wordcraft/prompt/bundle.hpp"

namespace wordcraft::prompt {

/// Wire form of a bundle, fields in normative order:
/// `{"schema_version":1,"task":...,"character":...,"base_prompt":[...],"regions":[{"id":1,"prompt":[...]}]}`.
/// `base_prompt` and `regions` are omitted when the task does not carry them.
nlohmann::ordered_json to_json(const PromptBundle& bundle);
std::string serialize_document(const PromptBundle& bundle);

/// Field-level validation. Unknown fields, wrong types and broken bundle
/// invariants are all SchemaViolation, with the offending path.
PromptBundle validate_document(const nlohmann::json& doc);
PromptBundle validate_document(std::string_view text);

}  // namespace wordcraft::prompt
