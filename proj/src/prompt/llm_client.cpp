// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/prompt/llm_client.hpp"

#include <cstdlib>

#include "httplib.h"
#include "wordcraft/prompt/document.hpp"

namespace wordcraft::prompt {

using nlohmann::json;

EndpointConfig EndpointConfig::from_json(const json& cfg) {
    EndpointConfig c;
    c.url = cfg.value("url", c.url);
    c.auth_header = cfg.value("auth_header", c.auth_header);
    c.auth_value = cfg.value("auth_value", c.auth_value);
    c.model_field = cfg.value("model_field", c.model_field);
    c.model = cfg.value("model", c.model);
    if (cfg.contains("temperature") && cfg["temperature"].is_number()) c.temperature = cfg["temperature"].get<double>();
    c.reply_pointer = cfg.value("reply_pointer", c.reply_pointer);
    c.retries = cfg.value("retries", c.retries);
    if (cfg.contains("timeout_ms")) c.timeout = std::chrono::milliseconds(cfg["timeout_ms"].get<long long>());
    return c;
}

EndpointConfig EndpointConfig::with_env_overrides() const {
    EndpointConfig c = *this;
    if (const char* url = std::getenv("WORDCRAFT_LLM_URL"); url && *url) c.url = url;
    return c;
}

const std::string& instruction_template() {
    static const std::string text = R"(You turn requests for artistic lettering into a JSON task document.
Classify the request as exactly one task and answer with a single JSON object, no prose required.

Task "global": one style for the whole character.
  {"schema_version":1,"task":"global","character":"<c>","base_prompt":[<tokens>]}
Task "multi_regional": a base style plus a style per user-marked region 1..N.
  {"schema_version":1,"task":"multi_regional","character":"<c>","base_prompt":[<tokens>],"regions":[{"id":1,"prompt":[<tokens>]}]}
Task "continuous_editing": restyle user-marked regions of an existing result; no base prompt.
  {"schema_version":1,"task":"continuous_editing","character":"<c>","regions":[{"id":1,"prompt":[<tokens>]}]}

Prompts are lists of single-word tokens. Prefer these tokens: red green blue gray solid stripes dots checker
red-background green-background blue-background gray-background. Abstract words are allowed; they are
expanded later.

Examples:
Q: Make the character "crane" look like white crane feathers.
A: {"schema_version":1,"task":"global","character":"鹤","base_prompt":["crane","feathers","white"]}
Q: Draw W in gray, with red stripes in the first marked area and blue dots in the second.
A: {"schema_version":1,"task":"multi_regional","character":"W","base_prompt":["solid","gray"],"regions":[{"id":1,"prompt":["stripes","red"]},{"id":2,"prompt":["dots","blue"]}]}
Q: Change the marked part of my W to green.
A: {"schema_version":1,"task":"continuous_editing","character":"W","regions":[{"id":1,"prompt":["solid","green"]}]}
)";
    return text;
}

std::optional<std::string> extract_first_document(std::string_view reply) {
    for (std::size_t start = reply.find('{'); start != std::string_view::npos; start = reply.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false, escaped = false;
        for (std::size_t i = start; i < reply.size(); ++i) {
            const char c = reply[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}' && --depth == 0) {
                std::string candidate(reply.substr(start, i - start + 1));
                if (json::accept(candidate)) return candidate;
                break;
            }
        }
    }
    return std::nullopt;
}

namespace {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Url split_url(const std::string& url) {
    const std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw PromptError(PromptErrc::EndpointUnreachable, "endpoint URL lacks a scheme: " + url);
    const std::size_t slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

std::string user_message(const UserRequest& request) {
    std::string text = "Q: " + request.query;
    if (request.region_count_hint) text += "\n(The user marked " + std::to_string(*request.region_count_hint) + " region(s).)";
    if (request.attachments) text += "\n(Region masks attached: " + *request.attachments + ")";
    return text;
}

}  // namespace

PromptBundle llm_decompose(const UserRequest& request, const EndpointConfig& config) {
    if (request.query.empty()) throw PromptError(PromptErrc::SchemaViolation, "request query is empty");
    if (!config.configured()) throw PromptError(PromptErrc::EndpointUnreachable, "no LLM endpoint configured");

    const Url url = split_url(config.url);
    httplib::Client client(url.origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    httplib::Headers headers;
    if (!config.auth_value.empty()) headers.emplace(config.auth_header, config.auth_value);

    json messages = json::array();
    messages.push_back({{"role", "system"}, {"content", instruction_template()}});
    messages.push_back({{"role", "user"}, {"content", user_message(request)}});

    std::string last_reply;
    std::string last_violation;
    for (int attempt = 0; attempt <= std::max(0, config.retries); ++attempt) {
        json body;
        if (!config.model.empty()) body[config.model_field] = config.model;
        if (config.temperature) body["temperature"] = *config.temperature;
        body["messages"] = messages;

        auto res = client.Post(url.path, headers, body.dump(), "application/json");
        if (!res) {
            const httplib::Error err = res.error();
            if (err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout) {
                throw PromptError(PromptErrc::Timeout, "endpoint did not answer in time (" + httplib::to_string(err) + ")");
            }
            throw PromptError(PromptErrc::EndpointUnreachable, config.url + ": " + httplib::to_string(err));
        }
        if (res->status < 200 || res->status >= 300) {
            throw PromptError(PromptErrc::EndpointUnreachable, config.url + " answered HTTP " + std::to_string(res->status));
        }

        last_reply.clear();
        try {
            const json response = json::parse(res->body);
            const json& reply = response.at(json::json_pointer(config.reply_pointer));
            last_reply = reply.is_string() ? reply.get<std::string>() : reply.dump();
        } catch (const std::exception&) {
            last_reply = res->body;
        }

        const std::optional<std::string> doc = extract_first_document(last_reply);
        try {
            if (!doc) throw PromptError::schema("", "reply contains no JSON document");
            return validate_document(std::string_view(*doc));
        } catch (const PromptError& violation) {
            last_violation = violation.what();
        }
        messages.push_back({{"role", "assistant"}, {"content", last_reply}});
        messages.push_back({{"role", "user"},
                            {"content", "That document was rejected (" + last_violation +
                                            "). Reply with one corrected JSON document."}});
    }
    PromptError err(PromptErrc::SchemaViolationAfterRetries,
                    std::to_string(std::max(0, config.retries) + 1) + " attempts failed; last: " + last_violation);
    err.set_raw_reply(last_reply);
    throw err;
}

}  // namespace wordcraft::prompt
