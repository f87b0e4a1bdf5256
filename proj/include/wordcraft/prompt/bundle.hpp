// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wordcraft::prompt {

enum class TaskType { global, multi_regional, continuous_editing };

const char* to_string(TaskType task);
std::optional<TaskType> task_from_string(std::string_view name);

using TokenList = std::vector<std::string>;

struct RegionPrompt {
    int id = 0;
    TokenList prompt;
    bool operator==(const RegionPrompt&) const = default;
};

inline constexpr int kSchemaVersion = 1;

/// Parsed task document: which task, which character(s), and the prompts.
struct PromptBundle {
    TaskType task = TaskType::global;
    std::string character;
    std::optional<TokenList> base_prompt;
    std::vector<RegionPrompt> regions;  // ordered by id, ids 1..N
    int schema_version = kSchemaVersion;

    std::size_t region_count() const { return regions.size(); }
    bool operator==(const PromptBundle&) const = default;
};

enum class PromptErrc {
    SyntaxError,
    DuplicateRegion,
    MissingBase,
    RegionOnGlobal,
    MissingRegions,
    BaseOnEdit,
    NonContiguousRegions,
    InvalidToken,
    EmptyCharacter,
    SchemaViolation,
    EndpointUnreachable,
    SchemaViolationAfterRetries,
    Timeout,
};

const char* to_string(PromptErrc code);

class PromptError : public std::runtime_error {
public:
    PromptError(PromptErrc code, const std::string& what);
    static PromptError syntax(std::size_t position, const std::string& expected);
    static PromptError schema(const std::string& path, const std::string& reason);

    PromptErrc code() const noexcept { return code_; }
    /// Byte offset into the input for SyntaxError.
    std::size_t position() const noexcept { return position_; }
    /// Document path (e.g. `regions[1].id`) for SchemaViolation.
    const std::string& path() const noexcept { return path_; }
    /// Last raw endpoint reply for SchemaViolationAfterRetries.
    const std::string& raw_reply() const noexcept { return raw_reply_; }
    void set_raw_reply(std::string reply) { raw_reply_ = std::move(reply); }

private:
    PromptErrc code_;
    std::size_t position_ = 0;
    std::string path_;
    std::string raw_reply_;
};

/// A token is non-empty and free of whitespace, ';' and '"'.
bool is_valid_token(std::string_view token);

/// Throws PromptError if any bundle invariant is broken.
void check_invariants(const PromptBundle& bundle);

/// Every token of the bundle (base, then regions in order) that `known` rejects.
std::vector<std::string> out_of_vocabulary(const PromptBundle& bundle,
                                           const std::function<bool(std::string_view)>& known);

}  // namespace wordcraft::prompt
