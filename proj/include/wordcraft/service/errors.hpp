// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <exception>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace wordcraft::service {

enum class ServiceErrc { BadRequest, NotFound, Conflict, Upstream, UpstreamTimeout, Io, Internal };

const char* to_string(ServiceErrc code);

class ServiceError : public std::runtime_error {
public:
    ServiceError(ServiceErrc code, const std::string& what, nlohmann::json detail = nlohmann::json::object())
        : std::runtime_error(what), code_(code), detail_(std::move(detail)) {}
    ServiceErrc code() const noexcept { return code_; }
    const nlohmann::json& detail() const noexcept { return detail_; }

private:
    ServiceErrc code_;
    nlohmann::json detail_;
};

/// An exception from any module mapped onto the service's error classes.
struct Failure {
    ServiceErrc kind = ServiceErrc::Internal;
    std::string code;  // module error code, e.g. "SyntaxError"
    std::string message;
    nlohmann::json detail = nlohmann::json::object();

    int http_status() const;
    nlohmann::json to_json() const;
};

Failure classify(const std::exception& e);

}  // namespace wordcraft::service
