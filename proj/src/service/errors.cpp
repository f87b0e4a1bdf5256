// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/service/errors.hpp"

#include <filesystem>

#include "wordcraft/attention/errors.hpp"
#include "wordcraft/glyph/outline.hpp"
#include "wordcraft/image.hpp"
#include "wordcraft/model/config.hpp"
#include "wordcraft/prompt/bundle.hpp"
#include "wordcraft/sampler/trajectory.hpp"

namespace wordcraft::service {

const char* to_string(ServiceErrc code) {
    switch (code) {
        case ServiceErrc::BadRequest: return "BadRequest";
        case ServiceErrc::NotFound: return "NotFound";
        case ServiceErrc::Conflict: return "Conflict";
        case ServiceErrc::Upstream: return "Upstream";
        case ServiceErrc::UpstreamTimeout: return "UpstreamTimeout";
        case ServiceErrc::Io: return "Io";
        case ServiceErrc::Internal: return "Internal";
    }
    return "?";
}

int Failure::http_status() const {
    switch (kind) {
        case ServiceErrc::BadRequest: return 400;
        case ServiceErrc::NotFound: return 404;
        case ServiceErrc::Conflict: return 409;
        case ServiceErrc::Upstream: return 502;
        case ServiceErrc::UpstreamTimeout: return 504;
        case ServiceErrc::Io:
        case ServiceErrc::Internal: return 500;
    }
    return 500;
}

nlohmann::json Failure::to_json() const {
    nlohmann::json j = detail;
    j["error"] = code;
    j["message"] = message;
    return j;
}

Failure classify(const std::exception& e) {
    Failure f;
    f.message = e.what();
    if (const auto* s = dynamic_cast<const ServiceError*>(&e)) {
        f.kind = s->code();
        f.detail = s->detail();
        f.code = f.detail.value("code", std::string(to_string(s->code())));
        f.detail.erase("code");
    } else if (const auto* p = dynamic_cast<const prompt::PromptError*>(&e)) {
        f.code = prompt::to_string(p->code());
        switch (p->code()) {
            case prompt::PromptErrc::EndpointUnreachable: f.kind = ServiceErrc::Upstream; break;
            case prompt::PromptErrc::Timeout: f.kind = ServiceErrc::UpstreamTimeout; break;
            case prompt::PromptErrc::SchemaViolationAfterRetries:
                f.kind = ServiceErrc::Upstream;
                f.detail["raw_reply"] = p->raw_reply();
                break;
            default: f.kind = ServiceErrc::BadRequest;
        }
        if (p->code() == prompt::PromptErrc::SyntaxError) f.detail["position"] = p->position();
        if (!p->path().empty()) f.detail["path"] = p->path();
    } else if (const auto* g = dynamic_cast<const glyph::GlyphError*>(&e)) {
        f.kind = ServiceErrc::BadRequest;
        f.code = glyph::to_string(g->code());
    } else if (const auto* a = dynamic_cast<const attention::AttentionError*>(&e)) {
        f.kind = a->code() == attention::AttentionErrc::OverlappingRegions ? ServiceErrc::Conflict : ServiceErrc::BadRequest;
        f.code = attention::to_string(a->code());
    } else if (const auto* sm = dynamic_cast<const sampler::SamplerError*>(&e)) {
        f.code = sampler::to_string(sm->code());
        switch (sm->code()) {
            case sampler::SamplerErrc::OverlappingRegions: f.kind = ServiceErrc::Conflict; break;
            case sampler::SamplerErrc::BadTrajectory: f.kind = ServiceErrc::Internal; break;
            default: f.kind = ServiceErrc::BadRequest;
        }
    } else if (const auto* m = dynamic_cast<const model::ModelError*>(&e)) {
        f.code = model::to_string(m->code());
        f.kind = m->code() == model::ModelErrc::BadCheckpoint ? ServiceErrc::Io : ServiceErrc::BadRequest;
    } else if (dynamic_cast<const ImageError*>(&e)) {
        f.kind = ServiceErrc::BadRequest;
        f.code = "MalformedImage";
    } else if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) {
        f.kind = ServiceErrc::Io;
        f.code = "IoError";
    } else if (dynamic_cast<const nlohmann::json::exception*>(&e)) {
        f.kind = ServiceErrc::BadRequest;
        f.code = "MalformedJson";
    } else {
        f.kind = ServiceErrc::Internal;
        f.code = "Internal";
    }
    return f;
}

}  // namespace wordcraft::service
