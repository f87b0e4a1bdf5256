// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/service/http.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include "httplib.h"
#include "wordcraft/service/errors.hpp"

namespace wordcraft::service {

using nlohmann::json;

ServiceConfig ServiceConfig::from_json(const json& j) {
    ServiceConfig c;
    if (j.contains("addr")) c.set_addr(j["addr"].get<std::string>());
    if (j.contains("store")) c.store_dir = j["store"].get<std::string>();
    if (j.contains("checkpoint")) c.checkpoint = j["checkpoint"].get<std::string>();
    if (j.contains("font_dir")) c.font_dir = j["font_dir"].get<std::string>();
    if (j.contains("cors_origin")) c.cors_origin = j["cors_origin"].get<std::string>();
    if (j.contains("llm")) c.llm = prompt::EndpointConfig::from_json(j["llm"]);
    return c;
}

ServiceConfig ServiceConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ServiceError(ServiceErrc::Io, "cannot read config " + path.string());
    return from_json(json::parse(in));
}

ServiceConfig ServiceConfig::with_env_overrides() const {
    ServiceConfig c = *this;
    if (const char* v = std::getenv("WORDCRAFT_ADDR")) c.set_addr(v);
    if (const char* v = std::getenv("WORDCRAFT_STORE")) c.store_dir = v;
    if (const char* v = std::getenv("WORDCRAFT_CHECKPOINT")) c.checkpoint = v;
    c.llm = c.llm.with_env_overrides();
    return c;
}

void ServiceConfig::set_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) {
        host = addr;
        return;
    }
    if (colon > 0) host = addr.substr(0, colon);
    try {
        port = std::stoi(addr.substr(colon + 1));
    } catch (const std::exception&) {
        throw ServiceError(ServiceErrc::BadRequest, "bad address '" + addr + "'", {{"code", "InvalidAddress"}});
    }
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_bytes(httplib::Response& res, const std::vector<std::uint8_t>& bytes, const char* type) {
    res.status = 200;
    res.set_content(std::string(bytes.begin(), bytes.end()), type);
}

json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    return json::parse(req.body);
}

std::size_t index_of(const std::string& text) {
    std::size_t n = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc() || p != text.data() + text.size()) throw ServiceError(ServiceErrc::NotFound, "no history entry " + text);
    return n;
}

}  // namespace

HttpServer::HttpServer(SessionService& service, std::string cors_origin)
    : service_(service), cors_origin_(std::move(cors_origin)), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return server_->listen_after_bind(); }
void HttpServer::stop() { server_->stop(); }
void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }

void HttpServer::install_routes() {
    httplib::Server& s = *server_;
    s.set_default_headers({{"Access-Control-Allow-Origin", cors_origin_},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            const Failure f = classify(e);
            send_json(res, f.to_json(), f.http_status());
        } catch (...) {
            send_json(res, {{"error", "Internal"}, {"message", "unknown failure"}}, 500);
        }
    });
    s.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    s.Get("/health", [this](const httplib::Request&, httplib::Response& res) { send_json(res, service_.health()); });
    s.Get("/fonts", [this](const httplib::Request&, httplib::Response& res) { send_json(res, service_.fonts()); });
    s.Post("/parse", [this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, service_.parse(body_of(req)));
    });
    s.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, service_.create_session(body_of(req)), 201);
    });
    s.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, {{"sessions", service_.session_ids()}});
    });
    s.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, service_.session_document(req.matches[1]));
    });
    s.Post(R"(/sessions/([^/]+)/generate)", [this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, service_.generate(req.matches[1], body_of(req)));
    });
    s.Post(R"(/sessions/([^/]+)/edit)", [this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, service_.edit(req.matches[1], body_of(req)));
    });
    s.Post(R"(/sessions/([^/]+)/import)", [this](const httplib::Request& req, httplib::Response& res) {
        // Raw PNG body, or JSON {image: base64 PNG, steps}.
        int steps = req.has_param("steps") ? std::stoi(req.get_param_value("steps")) : 32;
        std::string png;
        if (req.get_header_value("Content-Type").rfind("image/png", 0) == 0) {
            png = req.body;
        } else {
            const json body = body_of(req);
            if (!body.contains("image") || !body["image"].is_string()) {
                throw ServiceError(ServiceErrc::BadRequest, "body needs a base64 'image'", {{"code", "MalformedRequest"}});
            }
            png = base64_decode(body["image"].get<std::string>());
            steps = body.value("steps", steps);
        }
        send_json(res, service_.import_image(req.matches[1], std::vector<std::uint8_t>(png.begin(), png.end()), steps));
    });
    s.Get(R"(/sessions/([^/]+)/images/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const bool alpha = req.has_param("alpha") && req.get_param_value("alpha") == "1";
        send_bytes(res, service_.image(req.matches[1], index_of(req.matches[2]), alpha), "image/png");
    });
    s.Get(R"(/sessions/([^/]+)/trajectories/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        send_bytes(res, service_.trajectory(req.matches[1], index_of(req.matches[2])), "application/octet-stream");
    });
    s.Get(R"(/sessions/([^/]+)/glyph)", [this](const httplib::Request& req, httplib::Response& res) {
        send_bytes(res, service_.glyph_png(req.matches[1]), "image/png");
    });
    s.Get(R"(/sessions/([^/]+)/depth)", [this](const httplib::Request& req, httplib::Response& res) {
        send_bytes(res, service_.depth_png(req.matches[1]), "image/png");
    });
}

}  // namespace wordcraft::service
