// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/prompt/document.hpp"

#include <set>

namespace wordcraft::prompt {

using nlohmann::json;

nlohmann::ordered_json to_json(const PromptBundle& bundle) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = bundle.schema_version;
    doc["task"] = to_string(bundle.task);
    doc["character"] = bundle.character;
    if (bundle.base_prompt) doc["base_prompt"] = *bundle.base_prompt;
    if (bundle.task != TaskType::global) {
        doc["regions"] = nlohmann::ordered_json::array();
        for (const RegionPrompt& r : bundle.regions) {
            nlohmann::ordered_json entry;
            entry["id"] = r.id;
            entry["prompt"] = r.prompt;
            doc["regions"].push_back(std::move(entry));
        }
    }
    return doc;
}

std::string serialize_document(const PromptBundle& bundle) {
    check_invariants(bundle);
    return to_json(bundle).dump();
}

namespace {

void only_fields(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* name : allowed) ok = ok || it.key() == name;
        if (!ok) throw PromptError::schema(path + (path.empty() ? "" : ".") + it.key(), "unknown field");
    }
}

const json& require(const json& obj, const std::string& path, const char* name) {
    auto it = obj.find(name);
    if (it == obj.end()) throw PromptError::schema(path + (path.empty() ? "" : ".") + name, "required field missing");
    return *it;
}

TokenList token_list(const json& value, const std::string& path) {
    if (!value.is_array()) throw PromptError::schema(path, "expected an array of tokens");
    if (value.empty()) throw PromptError::schema(path, "token list must be non-empty");
    TokenList out;
    for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string at = path + "[" + std::to_string(i) + "]";
        if (!value[i].is_string()) throw PromptError::schema(at, "expected a string token");
        std::string token = value[i].get<std::string>();
        if (!is_valid_token(token)) throw PromptError::schema(at, "token must be non-empty without whitespace, ';' or '\"'");
        out.push_back(std::move(token));
    }
    return out;
}

}  // namespace

PromptBundle validate_document(const json& doc) {
    if (!doc.is_object()) throw PromptError::schema("", "expected an object");
    only_fields(doc, "", {"schema_version", "task", "character", "base_prompt", "regions"});

    const json& version = require(doc, "", "schema_version");
    if (!version.is_number_integer() || version.get<long long>() != kSchemaVersion) {
        throw PromptError::schema("schema_version", "must be the integer " + std::to_string(kSchemaVersion));
    }
    const json& task_field = require(doc, "", "task");
    if (!task_field.is_string()) throw PromptError::schema("task", "expected a string");
    const auto task = task_from_string(task_field.get<std::string>());
    if (!task) throw PromptError::schema("task", "must be global, multi_regional or continuous_editing");

    const json& character = require(doc, "", "character");
    if (!character.is_string() || character.get<std::string>().empty()) {
        throw PromptError::schema("character", "expected a non-empty string");
    }

    PromptBundle b;
    b.task = *task;
    b.character = character.get<std::string>();

    const bool wants_base = b.task != TaskType::continuous_editing;
    const bool wants_regions = b.task != TaskType::global;
    if (doc.contains("base_prompt")) {
        if (!wants_base) throw PromptError::schema("base_prompt", "not allowed for continuous_editing");
        b.base_prompt = token_list(doc["base_prompt"], "base_prompt");
    } else if (wants_base) {
        throw PromptError::schema("base_prompt", "required field missing");
    }
    if (doc.contains("regions")) {
        if (!wants_regions) throw PromptError::schema("regions", "not allowed for global");
        const json& regions = doc["regions"];
        if (!regions.is_array()) throw PromptError::schema("regions", "expected an array");
        if (regions.empty()) throw PromptError::schema("regions", "must list at least one region");
        std::set<int> seen;
        for (std::size_t i = 0; i < regions.size(); ++i) {
            const std::string at = "regions[" + std::to_string(i) + "]";
            const json& entry = regions[i];
            if (!entry.is_object()) throw PromptError::schema(at, "expected an object");
            only_fields(entry, at, {"id", "prompt"});
            const json& id = require(entry, at, "id");
            if (!id.is_number_integer()) throw PromptError::schema(at + ".id", "expected an integer");
            const long long value = id.get<long long>();
            if (value < 1) throw PromptError::schema(at + ".id", "must be >= 1");
            if (!seen.insert(static_cast<int>(value)).second) throw PromptError::schema(at + ".id", "duplicate region id");
            if (value != static_cast<long long>(i) + 1) {
                throw PromptError::schema(at + ".id", "region ids must be contiguous from 1 in order");
            }
            b.regions.push_back({static_cast<int>(value), token_list(require(entry, at, "prompt"), at + ".prompt")});
        }
    } else if (wants_regions) {
        throw PromptError::schema("regions", "required field missing");
    }
    try {
        check_invariants(b);
    } catch (const PromptError& e) {
        throw PromptError::schema("", e.what());
    }
    return b;
}

PromptBundle validate_document(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw PromptError::schema("", std::string("malformed document: ") + e.what());
    }
    return validate_document(doc);
}

}  // namespace wordcraft::prompt
