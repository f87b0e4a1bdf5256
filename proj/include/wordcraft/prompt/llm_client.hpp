// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "wordcraft/prompt/bundle.hpp"

namespace wordcraft::prompt {

/// Open-ended request from a user.
struct UserRequest {
    std::string query;
    std::optional<int> region_count_hint;
    /// Opaque reference to user-drawn regions, forwarded to the model as a hint.
    std::optional<std::string> attachments;
};

/// Chat-completion endpoint adapter. Model name and temperature are sent only
/// when configured.
struct EndpointConfig {
    std::string url;  // e.g. http://127.0.0.1:8080/v1/chat/completions
    std::string auth_header = "Authorization";
    std::string auth_value;
    std::string model_field = "model";
    std::string model;
    std::optional<double> temperature;
    /// JSON pointer to the reply text inside the response body.
    std::string reply_pointer = "/choices/0/message/content";
    int retries = 2;
    std::chrono::milliseconds timeout{30000};

    bool configured() const { return !url.empty(); }

    /// Reads an adapter config object; unknown keys are ignored.
    static EndpointConfig from_json(const nlohmann::json& cfg);
    /// Applies WORDCRAFT_LLM_URL when set.
    EndpointConfig with_env_overrides() const;
};

/// The fixed system instruction sent with every decomposition request.
const std::string& instruction_template();

/// First balanced `{...}` object in `reply` that parses as JSON, if any.
std::optional<std::string> extract_first_document(std::string_view reply);

/// Asks the endpoint to decompose `request` into a bundle, validating the reply.
/// On SchemaViolation the violation is appended to the conversation and the
/// request retried, up to `config.retries` extra attempts.
PromptBundle llm_decompose(const UserRequest& request, const EndpointConfig& config);

}  // namespace wordcraft::prompt
