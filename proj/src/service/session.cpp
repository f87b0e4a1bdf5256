// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/service/session.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "wordcraft/attention/regions.hpp"
#include "wordcraft/prompt/document.hpp"
#include "wordcraft/prompt/grammar.hpp"
#include "wordcraft/prompt/lexicon.hpp"
#include "wordcraft/service/errors.hpp"

namespace wordcraft::service {

using nlohmann::json;

namespace {

[[noreturn]] void bad_request(const std::string& code, const std::string& what) {
    throw ServiceError(ServiceErrc::BadRequest, what, {{"code", code}});
}

std::int64_t now() { return static_cast<std::int64_t>(std::time(nullptr)); }

json bundle_json(const prompt::PromptBundle& b) { return json::parse(prompt::serialize_document(b)); }

prompt::TokenList split_tokens(const std::string& text) {
    std::istringstream in(text);
    prompt::TokenList out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

prompt::TokenList tokens_of(const json& j) {
    if (j.is_string()) return split_tokens(j.get<std::string>());
    if (j.is_array()) return j.get<prompt::TokenList>();
    bad_request("MalformedRequest", "a region prompt must be a string or a list of tokens");
}

std::optional<std::uint64_t> seed_of(const json& body) {
    if (!body.contains("seed") || body["seed"].is_null()) return std::nullopt;
    const json& s = body["seed"];
    if (s.is_number_unsigned()) return s.get<std::uint64_t>();
    if (s.is_string()) return parse_seed(s.get<std::string>());
    bad_request("InvalidSeed", "seed must be an unsigned integer or a decimal string");
}

// Request masks: RLE strings pass through, anything else is base64 PNG.
std::vector<std::string> wire_masks(const json& body, const char* key) {
    std::vector<std::string> out;
    if (!body.contains(key) || body[key].is_null()) return out;
    if (!body[key].is_array()) bad_request("MalformedRequest", std::string(key) + " must be a list of masks");
    for (const json& m : body[key]) {
        if (!m.is_string()) bad_request("MalformedMask", "each mask must be an RLE string or base64 PNG");
        const std::string s = m.get<std::string>();
        out.push_back(s.rfind("rle:", 0) == 0 ? s : base64_decode(s));
    }
    return out;
}

json mask_list(const sampler::Trajectory& t) {
    json out = json::array();
    for (const auto& m : t.conditioning.masks) out.push_back(attention::encode_rle(m));
    return out;
}

std::string image_url(const std::string& id, std::size_t n) { return "/sessions/" + id + "/images/" + std::to_string(n); }
std::string trajectory_url(const std::string& id, std::size_t n) {
    return "/sessions/" + id + "/trajectories/" + std::to_string(n);
}

}  // namespace

json Session::to_json() const {
    json h = json::array();
    for (const HistoryEntry& e : history) h.push_back({{"op", e.op}, {"image", e.image}, {"trajectory", e.trajectory}});
    return {{"id", id},           {"bundle", bundle_json(bundle)}, {"font", font},       {"glyph", glyph},
            {"depth_png", depth_png}, {"depth", depth},            {"history", h},       {"created", created},
            {"updated", updated}};
}

Session Session::from_json(const json& j) {
    Session s;
    s.id = j.at("id").get<std::string>();
    s.bundle = prompt::validate_document(j.at("bundle"));
    s.font = j.at("font").get<std::string>();
    s.glyph = j.at("glyph").get<std::string>();
    s.depth_png = j.at("depth_png").get<std::string>();
    s.depth = j.at("depth").get<std::string>();
    for (const json& e : j.at("history")) {
        s.history.push_back({e.at("op"), e.at("image").get<std::string>(), e.at("trajectory").get<std::string>()});
    }
    s.created = j.at("created").get<std::int64_t>();
    s.updated = j.at("updated").get<std::int64_t>();
    return s;
}

void FontRegistry::add(const std::string& name, glyph::Font font) {
    fonts_[name] = std::make_shared<const glyph::Font>(std::move(font));
}

void FontRegistry::add_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.path().extension() == ".ttf") add(entry.path().stem().string(), glyph::Font::from_file(entry.path()));
    }
}

const glyph::Font& FontRegistry::get(const std::string& name) const {
    const auto it = fonts_.find(name);
    if (it == fonts_.end()) {
        throw ServiceError(ServiceErrc::BadRequest, "unknown font '" + name + "'", {{"code", "UnsupportedFont"}});
    }
    return *it->second;
}

const std::string& FontRegistry::default_name() const {
    if (fonts_.empty()) throw ServiceError(ServiceErrc::BadRequest, "no fonts are installed", {{"code", "UnsupportedFont"}});
    return fonts_.begin()->first;
}

std::vector<std::string> FontRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, font] : fonts_) out.push_back(name);
    return out;
}

FaultInjection fault_point_from_env() {
    const char* v = std::getenv("WORDCRAFT_FAULT");
    if (!v) return {};
    const std::string s(v);
    const auto colon = s.find(':');
    const std::string name = s.substr(0, colon);
    FaultInjection f;
    if (name == "after-artifacts") f.point = FaultPoint::after_artifacts;
    if (name == "during-index") f.point = FaultPoint::during_index;
    if (colon != std::string::npos) f.at_commit = std::atoi(s.c_str() + colon + 1);
    return f;
}

SessionService::SessionService(ArtifactStore& store, const Engine& engine, FontRegistry fonts, prompt::EndpointConfig llm,
                               FaultInjection fault)
    : store_(store), engine_(engine), fonts_(std::move(fonts)), llm_(std::move(llm)), fault_(fault) {
    store_.sweep_temporaries();
}

json parse_document(const json& body, const prompt::EndpointConfig& llm) {
    if (!body.is_object() || !body.contains("query") || !body["query"].is_string()) {
        bad_request("MalformedRequest", "body needs a string 'query'");
    }
    const std::string query = body["query"].get<std::string>();
    if (!body.value("use_llm", false)) return bundle_json(prompt::parse_structured(query));
    if (!llm.configured()) {
        throw ServiceError(ServiceErrc::Upstream, "no LLM endpoint is configured", {{"code", "EndpointUnreachable"}});
    }
    prompt::UserRequest request{query, std::nullopt, std::nullopt};
    if (body.contains("region_count_hint") && body["region_count_hint"].is_number_integer()) {
        request.region_count_hint = body["region_count_hint"].get<int>();
    }
    return bundle_json(prompt::expand_bundle(prompt::llm_decompose(request, llm), prompt::default_lexicon()));
}

json SessionService::parse(const json& body) const { return parse_document(body, llm_); }

json SessionService::create_session(const json& body) {
    if (!body.is_object()) bad_request("MalformedRequest", "body must be an object");
    prompt::PromptBundle bundle;
    if (body.contains("bundle")) {
        bundle = prompt::validate_document(body["bundle"]);
    } else if (body.contains("query") && body["query"].is_string()) {
        bundle = prompt::parse_structured(body["query"].get<std::string>());
    } else {
        bad_request("MalformedRequest", "body needs a 'bundle' document or a structured 'query'");
    }
    const std::string font = body.value("font", fonts_.default_name());
    const glyph::PreparedText text = engine_.prepare(fonts_.get(font), bundle.character);

    Session s;
    s.id = new_uuid();
    s.bundle = bundle;
    s.font = font;
    s.glyph = store_.put(png::encode(text.coverage), "png");
    s.depth_png = store_.put(png::encode(text.depth.to_image(), 16), "png");
    s.depth = store_.put(encode_depth(text.depth), "f32");
    s.created = now();
    {
        std::lock_guard<std::mutex> guard(lock_for(s.id));
        commit(s);
    }
    return {{"session_id", s.id},
            {"glyph", s.glyph},
            {"depth", s.depth_png},
            {"glyph_url", "/sessions/" + s.id + "/glyph"},
            {"depth_url", "/sessions/" + s.id + "/depth"},
            {"font", font}};
}

HistoryEntry SessionService::store_run(const RunOutput& run, json op) {
    HistoryEntry e;
    e.op = std::move(op);
    e.image = store_.put(run.image_png, "png");
    e.trajectory = store_.put(run.trajectory_bytes, "wctj");
    return e;
}

json SessionService::generate(const std::string& id, const json& body) {
    if (!body.is_object()) bad_request("MalformedRequest", "body must be an object");
    std::lock_guard<std::mutex> guard(lock_for(id));
    Session s = load(id);
    const int count = body.value("count", 1);
    if (count < 1 || count > kMaxCount) bad_request("InvalidCount", "count must be in [1, " + std::to_string(kMaxCount) + "]");
    const std::optional<std::uint64_t> seed = seed_of(body);
    GenerateParams p;
    p.steps = body.value("steps", 32);
    p.masks = wire_masks(body, "regions");
    const glyph::DepthMap depth = decode_depth(store_.get(s.depth));

    json results = json::array();
    for (int i = 0; i < count; ++i) {
        p.seed = seed ? *seed + static_cast<std::uint64_t>(i) : entropy_seed();
        const RunOutput run = engine_.generate(s.bundle, depth, p);
        json op = {{"op", "generate"},
                   {"seed", std::to_string(p.seed)},
                   {"steps", p.steps},
                   {"masks", mask_list(run.trajectory)},
                   {"prompts", run.trajectory.conditioning.regions},
                   {"base", run.trajectory.conditioning.base}};
        s.history.push_back(store_run(run, op));
        const std::size_t n = s.history.size() - 1;
        results.push_back({{"history_index", n}, {"image", image_url(id, n)}, {"trajectory", trajectory_url(id, n)}, {"seed", op["seed"]}});
    }
    commit(s);
    json out = results[0];
    out["results"] = results;
    return out;
}

json SessionService::edit(const std::string& id, const json& body) {
    if (!body.is_object()) bad_request("MalformedRequest", "body must be an object");
    std::lock_guard<std::mutex> guard(lock_for(id));
    Session s = load(id);
    if (s.history.empty()) {
        throw ServiceError(ServiceErrc::BadRequest, "the session has no image to edit yet", {{"code", "MissingTrajectory"}});
    }
    std::size_t source = s.history.size() - 1;
    if (body.contains("history_index") && !body["history_index"].is_null()) {
        const long long k = body["history_index"].get<long long>();
        if (k < 0 || static_cast<std::size_t>(k) >= s.history.size()) {
            throw ServiceError(ServiceErrc::NotFound, "no history entry " + std::to_string(k));
        }
        source = static_cast<std::size_t>(k);
    }
    EditParams p;
    p.masks = wire_masks(body, "regions");
    if (p.masks.empty()) bad_request("MissingRegions", "an edit needs at least one region mask");
    if (body.contains("region_prompts") && !body["region_prompts"].is_null()) {
        for (const json& r : body["region_prompts"]) p.prompts.push_back(tokens_of(r));
    } else {
        p.prompts = bundle_region_prompts(s.bundle);
    }
    p.seed = seed_of(body).value_or(entropy_seed());
    const sampler::Trajectory src = sampler::decode_trajectory(store_.get(s.history[source].trajectory));
    const RunOutput run = engine_.edit(src, p);
    const json op = {{"op", "edit"},
                     {"source", source},
                     {"seed", std::to_string(p.seed)},
                     {"steps", src.schedule.steps},
                     {"masks", mask_list(run.trajectory)},
                     {"prompts", run.trajectory.conditioning.regions}};
    s.history.push_back(store_run(run, op));
    commit(s);
    const std::size_t n = s.history.size() - 1;
    return {{"history_index", n}, {"image", image_url(id, n)}, {"trajectory", trajectory_url(id, n)}, {"seed", op["seed"]}};
}

json SessionService::import_image(const std::string& id, const std::vector<std::uint8_t>& bytes, int steps) {
    std::lock_guard<std::mutex> guard(lock_for(id));
    Session s = load(id);
    const Image image = png::decode(bytes);
    const glyph::DepthMap depth = decode_depth(store_.get(s.depth));
    const RunOutput run = engine_.invert(s.bundle, depth, image, steps);
    s.history.push_back(store_run(run, {{"op", "import"}, {"steps", steps}, {"base", run.trajectory.conditioning.base}}));
    commit(s);
    const std::size_t n = s.history.size() - 1;
    return {{"history_index", n}, {"image", image_url(id, n)}, {"trajectory", trajectory_url(id, n)}};
}

json SessionService::session_document(const std::string& id) const {
    const Session s = load(id);
    json j = s.to_json();
    for (std::size_t n = 0; n < s.history.size(); ++n) {
        j["history"][n]["index"] = n;
        j["history"][n]["image_url"] = image_url(id, n);
        j["history"][n]["trajectory_url"] = trajectory_url(id, n);
    }
    j["current"] = s.history.empty() ? json(nullptr) : json(s.history.size() - 1);
    return j;
}

std::vector<std::uint8_t> SessionService::image(const std::string& id, std::size_t index, bool alpha) const {
    const Session s = load(id);
    if (index >= s.history.size()) throw ServiceError(ServiceErrc::NotFound, "no history entry " + std::to_string(index));
    if (!alpha) return store_.get(s.history[index].image);
    return engine_.transparent_png(sampler::decode_trajectory(store_.get(s.history[index].trajectory)));
}

std::vector<std::uint8_t> SessionService::trajectory(const std::string& id, std::size_t index) const {
    const Session s = load(id);
    if (index >= s.history.size()) throw ServiceError(ServiceErrc::NotFound, "no history entry " + std::to_string(index));
    return store_.get(s.history[index].trajectory);
}

std::vector<std::uint8_t> SessionService::glyph_png(const std::string& id) const { return store_.get(load(id).glyph); }
std::vector<std::uint8_t> SessionService::depth_png(const std::string& id) const { return store_.get(load(id).depth_png); }

json SessionService::health() const {
    return {{"status", "ok"}, {"checkpoint", engine_.checkpoint_digest()}};
}

json SessionService::fonts() const { return {{"fonts", fonts_.names()}, {"default", fonts_.default_name()}}; }

Session SessionService::load(const std::string& id) const {
    const std::optional<std::string> doc = store_.read_session(id);
    if (!doc) throw ServiceError(ServiceErrc::NotFound, "no session " + id);
    return Session::from_json(json::parse(*doc));
}

void SessionService::commit(Session& s) {
    const FaultPoint fault = ++commits_ == fault_.at_commit ? fault_.point : FaultPoint::none;
    if (fault == FaultPoint::after_artifacts) std::_Exit(86);
    s.updated = now();
    const std::string doc = s.to_json().dump(2);
    if (fault == FaultPoint::during_index) {
        // Leave a half-written temporary behind, as a crash inside atomic_write would.
        std::ofstream(store_.root() / "sessions" / (".tmp-" + s.id + ".json-crash")) << doc.substr(0, doc.size() / 2);
        std::_Exit(86);
    }
    store_.write_session(s.id, doc);
}

std::mutex& SessionService::lock_for(const std::string& id) {
    std::lock_guard<std::mutex> guard(locks_mutex_);
    auto& slot = locks_[id];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

}  // namespace wordcraft::service
