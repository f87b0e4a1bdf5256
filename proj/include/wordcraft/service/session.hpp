// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "wordcraft/glyph/truetype.hpp"
#include "wordcraft/prompt/bundle.hpp"
#include "wordcraft/prompt/llm_client.hpp"
#include "wordcraft/service/engine.hpp"
#include "wordcraft/service/store.hpp"

namespace wordcraft::service {

struct HistoryEntry {
    nlohmann::json op;  // operation descriptor: kind, seed, steps, masks, prompts, source
    std::string image;
    std::string trajectory;
};

struct Session {
    std::string id;
    prompt::PromptBundle bundle;
    std::string font;
    std::string glyph;      // coverage PNG
    std::string depth_png;  // 16-bit preview
    std::string depth;      // exact float blob used for sampling
    std::vector<HistoryEntry> history;
    std::int64_t created = 0;
    std::int64_t updated = 0;

    nlohmann::json to_json() const;
    static Session from_json(const nlohmann::json& j);
};

/// Fonts offered to clients, keyed by file stem.
class FontRegistry {
public:
    void add(const std::string& name, glyph::Font font);
    /// Adds every .ttf file in `dir`.
    void add_directory(const std::filesystem::path& dir);
    const glyph::Font& get(const std::string& name) const;
    /// First name in order, used when a request names no font.
    const std::string& default_name() const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, std::shared_ptr<const glyph::Font>> fonts_;
};

/// Where a test may ask the service to die mid-commit (WORDCRAFT_FAULT).
enum class FaultPoint { none, after_artifacts, during_index };

struct FaultInjection {
    FaultPoint point = FaultPoint::none;
    int at_commit = 1;  // 1-based count of index commits since start
};

/// Parses WORDCRAFT_FAULT=`after-artifacts[:n]` or `during-index[:n]`.
FaultInjection fault_point_from_env();

/// Body {query, use_llm, region_count_hint?} to a bundle document; shared by
/// POST /parse and the `parse` command.
nlohmann::json parse_document(const nlohmann::json& body, const prompt::EndpointConfig& llm);

/// Session operations over an artifact store. Operations on one session are
/// serialized; distinct sessions proceed concurrently.
class SessionService {
public:
    SessionService(ArtifactStore& store, const Engine& engine, FontRegistry fonts, prompt::EndpointConfig llm = {},
                   FaultInjection fault = {});

    nlohmann::json parse(const nlohmann::json& body) const;
    nlohmann::json create_session(const nlohmann::json& body);
    nlohmann::json generate(const std::string& id, const nlohmann::json& body);
    nlohmann::json edit(const std::string& id, const nlohmann::json& body);
    nlohmann::json import_image(const std::string& id, const std::vector<std::uint8_t>& png, int steps);

    nlohmann::json session_document(const std::string& id) const;
    std::vector<std::string> session_ids() const { return store_.session_ids(); }
    std::vector<std::uint8_t> image(const std::string& id, std::size_t index, bool alpha) const;
    std::vector<std::uint8_t> trajectory(const std::string& id, std::size_t index) const;
    std::vector<std::uint8_t> glyph_png(const std::string& id) const;
    std::vector<std::uint8_t> depth_png(const std::string& id) const;
    nlohmann::json health() const;
    nlohmann::json fonts() const;

private:
    Session load(const std::string& id) const;
    void commit(Session& s);
    std::mutex& lock_for(const std::string& id);
    HistoryEntry store_run(const RunOutput& run, nlohmann::json op);

    ArtifactStore& store_;
    const Engine& engine_;
    FontRegistry fonts_;
    prompt::EndpointConfig llm_;
    FaultInjection fault_;
    std::atomic<int> commits_{0};
    std::mutex locks_mutex_;
    std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace wordcraft::service
