// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/prompt/bundle.hpp"

#include <set>

namespace wordcraft::prompt {

const char* to_string(TaskType task) {
    switch (task) {
    case TaskType::global: return "global";
    case TaskType::multi_regional: return "multi_regional";
    case TaskType::continuous_editing: return "continuous_editing";
    }
    return "?";
}

std::optional<TaskType> task_from_string(std::string_view name) {
    if (name == "global") return TaskType::global;
    if (name == "multi_regional") return TaskType::multi_regional;
    if (name == "continuous_editing") return TaskType::continuous_editing;
    return std::nullopt;
}

const char* to_string(PromptErrc code) {
    switch (code) {
    case PromptErrc::SyntaxError: return "SyntaxError";
    case PromptErrc::DuplicateRegion: return "DuplicateRegion";
    case PromptErrc::MissingBase: return "MissingBase";
    case PromptErrc::RegionOnGlobal: return "RegionOnGlobal";
    case PromptErrc::MissingRegions: return "MissingRegions";
    case PromptErrc::BaseOnEdit: return "BaseOnEdit";
    case PromptErrc::NonContiguousRegions: return "NonContiguousRegions";
    case PromptErrc::InvalidToken: return "InvalidToken";
    case PromptErrc::EmptyCharacter: return "EmptyCharacter";
    case PromptErrc::SchemaViolation: return "SchemaViolation";
    case PromptErrc::EndpointUnreachable: return "EndpointUnreachable";
    case PromptErrc::SchemaViolationAfterRetries: return "SchemaViolationAfterRetries";
    case PromptErrc::Timeout: return "Timeout";
    }
    return "PromptError";
}

PromptError::PromptError(PromptErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

PromptError PromptError::syntax(std::size_t position, const std::string& expected) {
    PromptError e(PromptErrc::SyntaxError, "at offset " + std::to_string(position) + ": expected " + expected);
    e.position_ = position;
    return e;
}

PromptError PromptError::schema(const std::string& path, const std::string& reason) {
    PromptError e(PromptErrc::SchemaViolation, (path.empty() ? std::string("<root>") : path) + ": " + reason);
    e.path_ = path;
    return e;
}

bool is_valid_token(std::string_view token) {
    if (token.empty()) return false;
    for (char c : token) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == ';' || c == '"') {
            return false;
        }
    }
    return true;
}

void check_invariants(const PromptBundle& bundle) {
    if (bundle.character.empty()) {
        throw PromptError(PromptErrc::EmptyCharacter, "character must be non-empty");
    }
    const bool wants_base = bundle.task != TaskType::continuous_editing;
    const bool wants_regions = bundle.task != TaskType::global;
    if (wants_base && !bundle.base_prompt) {
        throw PromptError(PromptErrc::MissingBase, std::string(to_string(bundle.task)) + " task requires a base prompt");
    }
    if (!wants_base && bundle.base_prompt) {
        throw PromptError(PromptErrc::BaseOnEdit, "continuous_editing task must not carry a base prompt");
    }
    if (!wants_regions && !bundle.regions.empty()) {
        throw PromptError(PromptErrc::RegionOnGlobal, "global task must not carry region prompts");
    }
    if (wants_regions && bundle.regions.empty()) {
        throw PromptError(PromptErrc::MissingRegions, std::string(to_string(bundle.task)) + " task requires region prompts");
    }
    auto check_tokens = [](const TokenList& tokens, const std::string& where) {
        if (tokens.empty()) throw PromptError(PromptErrc::InvalidToken, where + " is empty");
        for (const std::string& t : tokens) {
            if (!is_valid_token(t)) throw PromptError(PromptErrc::InvalidToken, where + " has invalid token '" + t + "'");
        }
    };
    if (bundle.base_prompt) check_tokens(*bundle.base_prompt, "base prompt");
    std::set<int> seen;
    for (std::size_t i = 0; i < bundle.regions.size(); ++i) {
        const RegionPrompt& r = bundle.regions[i];
        if (!seen.insert(r.id).second) {
            throw PromptError(PromptErrc::DuplicateRegion, "region " + std::to_string(r.id) + " appears twice");
        }
        if (r.id != static_cast<int>(i) + 1) {
            throw PromptError(PromptErrc::NonContiguousRegions, "region ids must run 1..N in order");
        }
        check_tokens(r.prompt, "region " + std::to_string(r.id));
    }
}

std::vector<std::string> out_of_vocabulary(const PromptBundle& bundle,
                                           const std::function<bool(std::string_view)>& known) {
    std::vector<std::string> out;
    if (bundle.base_prompt) {
        for (const std::string& t : *bundle.base_prompt)
            if (!known(t)) out.push_back(t);
    }
    for (const RegionPrompt& r : bundle.regions) {
        for (const std::string& t : r.prompt)
            if (!known(t)) out.push_back(t);
    }
    return out;
}

}  // namespace wordcraft::prompt
