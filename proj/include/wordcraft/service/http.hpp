// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "json.hpp"
#include "wordcraft/prompt/llm_client.hpp"
#include "wordcraft/service/session.hpp"

namespace httplib {
class Server;
}

namespace wordcraft::service {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8765;
    std::filesystem::path store_dir = "wordcraft-store";
    std::string checkpoint;  // empty: untrained model
    std::filesystem::path font_dir = WORDCRAFT_DEFAULT_FONT_DIR;
    std::string cors_origin = "*";
    prompt::EndpointConfig llm;

    /// Keys: addr ("host:port"), store, checkpoint, font_dir, cors_origin, llm.
    static ServiceConfig from_json(const nlohmann::json& j);
    static ServiceConfig from_file(const std::filesystem::path& path);
    /// Applies WORDCRAFT_ADDR, WORDCRAFT_STORE, WORDCRAFT_LLM_URL and WORDCRAFT_CHECKPOINT.
    ServiceConfig with_env_overrides() const;
    void set_addr(const std::string& addr);
};

/// HTTP routes over a SessionService.
class HttpServer {
public:
    HttpServer(SessionService& service, std::string cors_origin = "*");
    ~HttpServer();

    /// Binds `host:port`; port 0 picks a free port. Returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); returns false if the listener failed.
    bool run();
    void stop();
    void wait_until_ready() const;

private:
    void install_routes();

    SessionService& service_;
    std::string cors_origin_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace wordcraft::service
