// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include <openssl/evp.h>

#include <atomic>
#include <fstream>
#include <set>
#include <thread>

#include "doctest.h"
#include "json.hpp"
#include "process.hpp"
#include "test_support.hpp"
#include "wordcraft/attention/regions.hpp"
#include "wordcraft/digest.hpp"
#include "wordcraft/glyph/prepare.hpp"
#include "wordcraft/model/checkpoint.hpp"
#include "wordcraft/prompt/document.hpp"
#include "wordcraft/prompt/grammar.hpp"
#include "wordcraft/sampler/trajectory.hpp"
#include "wordcraft/service/engine.hpp"
#include "wordcraft/service/errors.hpp"
#include "wordcraft/service/http.hpp"
#include "wordcraft/service/session.hpp"
#include "wordcraft/service/store.hpp"

// After Eigen: <resolv.h> defines a `_res` macro.
#include "httplib.h"

using namespace wordcraft;
using namespace wordcraft::service;
using nlohmann::json;
using wordcraft::testing::TempDir;

namespace {

const char* const kTwoRegions = R"(char "AB" ; task regions ; base: gray-background ; region 1: stripes red ; region 2: dots blue)";

std::string rle(int w, int h, const std::function<bool(int, int)>& on) {
    attention::BinaryGrid g(h, w, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) g.cells[static_cast<std::size_t>(y * w + x)] = on(x, y) ? 1 : 0;
    }
    return attention::encode_rle(g);
}

const std::string kLeft = rle(64, 64, [](int x, int) { return x < 32; });
const std::string kRight = rle(64, 64, [](int x, int) { return x >= 32; });
const std::string kTop = rle(64, 64, [](int, int y) { return y < 24; });
const std::string kEmpty = rle(64, 64, [](int, int) { return false; });

std::string base64(const std::string& bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

ServiceErrc error_kind(const std::function<void()>& f) {
    try {
        f();
    } catch (const ServiceError& e) {
        return e.code();
    }
    FAIL("no ServiceError thrown");
    return ServiceErrc::Internal;
}

// The initialized model predicts exactly x_t / t and every run collapses to
// the same image, so the HTTP tests use randomized weights.
const std::string& random_checkpoint() {
    static const std::string path = [] {
        const auto p = std::filesystem::temp_directory_path() / ("wordcraft-random-" + std::to_string(getpid()) + ".wcck");
        model::Denoiser<float> m(model::DenoiserConfig{});
        m.randomize(5, 0.15f);
        model::save_checkpoint(m, p);
        std::atexit([] { std::filesystem::remove(random_checkpoint()); });
        return p.string();
    }();
    return path;
}

const std::string kCheckpointEnv = "WORDCRAFT_CHECKPOINT=";

FontRegistry test_fonts() {
    FontRegistry fonts;
    fonts.add_directory(wordcraft::testing::test_font().parent_path());
    return fonts;
}

// Chat-completion stub on a loopback port.
class StubEndpoint {
public:
    explicit StubEndpoint(std::string reply) {
        server_.Post("/v1/chat/completions", [reply](const httplib::Request&, httplib::Response& res) {
            json body = {{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", reply}}}}})}};
            res.set_content(body.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubEndpoint() {
        server_.stop();
        thread_.join();
    }
    prompt::EndpointConfig config() const {
        prompt::EndpointConfig c;
        c.url = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
        c.timeout = std::chrono::milliseconds(5000);
        return c;
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

// In-process service on a free port with an untrained model.
struct Harness {
    explicit Harness(prompt::EndpointConfig llm = {})
        : dir("service"),
          engine(Engine::load(random_checkpoint())),
          store(dir.path()),
          service(store, engine, test_fonts(), std::move(llm)),
          http(service),
          port(http.bind("127.0.0.1", 0)),
          thread([this] { http.run(); }),
          client("127.0.0.1", port) {
        http.wait_until_ready();
        client.set_read_timeout(60, 0);
    }
    ~Harness() {
        http.stop();
        thread.join();
    }

    httplib::Result post(const std::string& path, const json& body) {
        return client.Post(path, body.dump(), "application/json");
    }
    json post_ok(const std::string& path, const json& body) {
        auto r = post(path, body);
        REQUIRE(r);
        INFO(r->body);
        REQUIRE((r->status == 200 || r->status == 201));
        return json::parse(r->body);
    }
    std::string get_ok(const std::string& path) {
        auto r = client.Get(path);
        REQUIRE(r);
        INFO(path << " " << r->body);
        REQUIRE(r->status == 200);
        return r->body;
    }
    std::string new_session(const std::string& query = kTwoRegions) {
        return post_ok("/sessions", {{"query", query}})["session_id"].get<std::string>();
    }

    TempDir dir;
    Engine engine;
    ArtifactStore store;
    SessionService service;
    HttpServer http;
    int port;
    std::thread thread;
    httplib::Client client;
};

}  // namespace

// ---------------------------------------------------------------------------
// Artifact store

TEST_CASE("store: content addressing is idempotent") {
    TempDir dir("store");
    ArtifactStore store(dir.path());
    const std::vector<std::uint8_t> bytes{1, 2, 3, 4};
    const std::string a = store.put(bytes, "bin");
    const std::string b = store.put(bytes, "bin");
    CHECK(a == b);
    CHECK(a == sha256_hex(bytes) + ".bin");
    CHECK(store.contains(a));
    CHECK(store.get(a) == bytes);
    CHECK(store.put(std::vector<std::uint8_t>{9}, "bin") != a);
}

TEST_CASE("store: malformed references and unknown sessions are not found") {
    TempDir dir("store");
    ArtifactStore store(dir.path());
    for (const char* ref : {"../secret.png", "abc.png", "", "objects/x"}) {
        CHECK(error_kind([&] { store.get(ref); }) == ServiceErrc::NotFound);
    }
    CHECK(error_kind([&] { store.get(std::string(64, 'a') + ".png"); }) == ServiceErrc::NotFound);
    CHECK_FALSE(store.read_session(new_uuid()));
    CHECK(error_kind([&] { store.read_session("../../etc/passwd"); }) == ServiceErrc::NotFound);
}

TEST_CASE("store: session index round trip and listing") {
    TempDir dir("store");
    ArtifactStore store(dir.path());
    const std::string id = new_uuid();
    store.write_session(id, "{\"v\":1}");
    store.write_session(id, "{\"v\":2}");
    CHECK(store.read_session(id) == std::optional<std::string>("{\"v\":2}"));
    CHECK(store.session_ids() == std::vector<std::string>{id});
}

TEST_CASE("store: sweep removes interrupted writes only") {
    TempDir dir("store");
    {
        ArtifactStore store(dir.path());
        store.write_session(new_uuid(), "{}");
        store.put(std::vector<std::uint8_t>{7}, "bin");
    }
    std::ofstream(dir / "sessions/.tmp-abc.json-x") << "{\"half";
    std::ofstream(dir / "objects/.tmp-def.png-y") << "xx";
    ArtifactStore store(dir.path());
    store.sweep_temporaries();
    std::size_t files = 0;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir.path())) {
        if (e.is_regular_file()) {
            ++files;
            CHECK(e.path().filename().string().rfind(".tmp-", 0) != 0);
        }
    }
    CHECK(files == 2);
    CHECK(store.session_ids().size() == 1);
}

TEST_CASE("store: atomic_write replaces the target") {
    TempDir dir("store");
    const auto path = dir / "f.bin";
    atomic_write(path, std::vector<std::uint8_t>{1, 2});
    atomic_write(path, std::vector<std::uint8_t>{3});
    CHECK(read_file(path) == std::vector<std::uint8_t>{3});
}

TEST_CASE("uuids are version 4 and fresh") {
    std::set<std::string> seen;
    for (int i = 0; i < 200; ++i) {
        const std::string id = new_uuid();
        CHECK(is_uuid(id));
        CHECK(id[14] == '4');
        CHECK(std::string("89ab").find(id[19]) != std::string::npos);
        seen.insert(id);
    }
    CHECK(seen.size() == 200);
    CHECK_FALSE(is_uuid("not-a-uuid"));
    CHECK_FALSE(is_uuid("123e4567-e89b-12d3-a456-42661417400G"));
}

// ---------------------------------------------------------------------------
// Engine helpers

TEST_CASE("parse_seed accepts the full 64-bit range and nothing else") {
    CHECK(parse_seed("0") == 0);
    CHECK(parse_seed("18446744073709551615") == 18446744073709551615ull);
    for (const char* bad : {"", "-1", "1x", " 1", "18446744073709551616", "0x10"}) {
        CHECK(error_kind([&] { parse_seed(bad); }) == ServiceErrc::BadRequest);
    }
}

TEST_CASE("base64_decode") {
    CHECK(base64_decode("aGVsbG8=") == "hello");
    CHECK(base64_decode("aGVsbG8") == "hello");
    CHECK(base64_decode("data:image/png;base64,aGk=") == "hi");
    CHECK(base64_decode("") == "");
    CHECK(error_kind([] { base64_decode("a$b="); }) == ServiceErrc::BadRequest);
}

TEST_CASE("depth blob round trip is exact") {
    const auto text = glyph::prepare_text(glyph::Font::from_file(wordcraft::testing::test_font()), "K", 64, kGlyphMargin);
    const auto bytes = encode_depth(text.depth);
    const glyph::DepthMap back = decode_depth(bytes);
    CHECK(back.width == 64);
    CHECK(back.values == text.depth.values);
    CHECK_THROWS(decode_depth(std::span<const std::uint8_t>(bytes.data(), bytes.size() - 1)));
}

TEST_CASE("latent_masks: downsampling, latent-size input and overlap detail") {
    const Engine engine = Engine::load("");
    const auto m = engine.latent_masks({rle(64, 64, [](int x, int y) { return x == 9 && y == 0; })});
    REQUIRE(m.size() == 1);
    CHECK(m[0].rows == 8);
    CHECK(m[0].count() == 1);
    CHECK(m[0].at(0, 1) == 1);

    const auto direct = engine.latent_masks({rle(8, 8, [](int x, int) { return x < 2; })});
    CHECK(direct[0].count() == 16);

    CHECK(error_kind([&] { engine.latent_masks({rle(16, 16, [](int, int) { return true; })}); }) == ServiceErrc::BadRequest);

    // Disjoint in pixels, but both touch latent column 3.
    try {
        engine.latent_masks({rle(64, 64, [](int x, int) { return x < 30; }), rle(64, 64, [](int x, int) { return x >= 30; })});
        FAIL("expected a conflict");
    } catch (const ServiceError& e) {
        CHECK(e.code() == ServiceErrc::Conflict);
        REQUIRE(e.detail()["cells"].size() == 8);
        for (const json& c : e.detail()["cells"]) CHECK(c["col"] == 3);
    }
}

TEST_CASE("failures map to HTTP status and wire codes") {
    const Failure f = classify(ServiceError(ServiceErrc::Conflict, "x", {{"code", "OverlappingRegions"}, {"cells", json::array()}}));
    CHECK(f.http_status() == 409);
    CHECK(f.to_json()["error"] == "OverlappingRegions");
    CHECK(f.to_json().contains("cells"));
    try {
        prompt::parse_structured("char \"A\" ; nonsense");
    } catch (const std::exception& e) {
        const Failure p = classify(e);
        CHECK(p.http_status() == 400);
        CHECK(p.code == "SyntaxError");
        CHECK(p.to_json()["position"].is_number());
    }
    CHECK(classify(std::runtime_error("boom")).http_status() == 500);
}

TEST_CASE("service config: file, then environment") {
    TempDir dir("config");
    std::ofstream(dir / "c.json") << R"({"addr": "0.0.0.0:9000", "store": "/s", "checkpoint": "ck.wcck", "cors_origin": "http://x"})";
    const ServiceConfig c = ServiceConfig::from_file(dir / "c.json");
    CHECK(c.host == "0.0.0.0");
    CHECK(c.port == 9000);
    CHECK(c.store_dir == "/s");
    CHECK(c.cors_origin == "http://x");
    setenv("WORDCRAFT_ADDR", "127.0.0.2:9100", 1);
    setenv("WORDCRAFT_STORE", "/t", 1);
    const ServiceConfig e = c.with_env_overrides();
    unsetenv("WORDCRAFT_ADDR");
    unsetenv("WORDCRAFT_STORE");
    CHECK(e.host == "127.0.0.2");
    CHECK(e.port == 9100);
    CHECK(e.store_dir == "/t");
    CHECK(e.checkpoint == "ck.wcck");
}

// ---------------------------------------------------------------------------
// HTTP

TEST_CASE("http: health reports the checkpoint digest; CORS headers present") {
    Harness h;
    auto r = h.client.Get("/health");
    REQUIRE(r);
    CHECK(r->status == 200);
    const json j = json::parse(r->body);
    CHECK(j["status"] == "ok");
    CHECK(j["checkpoint"] == h.engine.checkpoint_digest());
    CHECK(j["checkpoint"].get<std::string>().size() == 64);
    CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
    auto o = h.client.Options("/sessions");
    REQUIRE(o);
    CHECK(o->status == 204);
    CHECK(json::parse(h.get_ok("/fonts"))["fonts"] == json::array({"DejaVuSans-Bold-subset"}));
}

TEST_CASE("http: parse") {
    StubEndpoint stub(R"({"schema_version":1,"task":"global","character":"W","base_prompt":["fiery"]})");
    Harness h(stub.config());
    const json doc = h.post_ok("/parse", {{"query", kTwoRegions}, {"use_llm", false}});
    CHECK(doc == json::parse(prompt::serialize_document(prompt::parse_structured(kTwoRegions))));

    auto bad = h.post("/parse", {{"query", "char \"A\" ; bogus"}});
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(json::parse(bad->body)["error"] == "SyntaxError");
    CHECK(json::parse(bad->body)["position"].is_number());

    const json llm = h.post_ok("/parse", {{"query", "a fiery W"}, {"use_llm", true}});
    CHECK(llm["character"] == "W");
    // Abstract words come back expanded into engine tokens.
    CHECK(llm["base_prompt"] != json::array({"fiery"}));

    auto malformed = h.client.Post("/parse", "{not json", "application/json");
    REQUIRE(malformed);
    CHECK(malformed->status == 400);
}

TEST_CASE("http: parse with an unreachable endpoint is a 502") {
    prompt::EndpointConfig dead;
    dead.url = "http://127.0.0.1:9/v1/chat/completions";
    dead.retries = 0;
    dead.timeout = std::chrono::milliseconds(500);
    Harness h(dead);
    auto r = h.post("/parse", {{"query", "a W"}, {"use_llm", true}});
    REQUIRE(r);
    CHECK(r->status == 502);
    CHECK(json::parse(r->body)["error"] == "EndpointUnreachable");
}

TEST_CASE("http: create session") {
    Harness h;
    const json s = h.post_ok("/sessions", {{"query", "char \"OK\" ; task global ; base: solid red gray-background"}});
    const std::string id = s["session_id"];
    CHECK(is_uuid(id));
    const auto expected = glyph::prepare_text(glyph::Font::from_file(wordcraft::testing::test_font()), "OK", 64, kGlyphMargin);
    const std::string glyph_png = h.get_ok("/sessions/" + id + "/glyph");
    CHECK(png::decode(std::vector<std::uint8_t>(glyph_png.begin(), glyph_png.end())) == clamped(png::decode(png::encode(expected.coverage))));
    CHECK(!h.get_ok("/sessions/" + id + "/depth").empty());

    const json twin = h.post_ok("/sessions", {{"query", "char \"OK\" ; task global ; base: solid red gray-background"}});
    CHECK(twin["session_id"] != s["session_id"]);

    const json bundle = json::parse(prompt::serialize_document(prompt::parse_structured(kTwoRegions)));
    CHECK(is_uuid(h.post_ok("/sessions", {{"bundle", bundle}})["session_id"].get<std::string>()));

    json empty = bundle;
    empty["character"] = "";
    auto r = h.post("/sessions", {{"bundle", empty}});
    REQUIRE(r);
    CHECK(r->status == 400);

    auto font = h.post("/sessions", {{"query", kTwoRegions}, {"font", "Comic"}});
    REQUIRE(font);
    CHECK(font->status == 400);
    CHECK(json::parse(font->body)["error"] == "UnsupportedFont");

    auto glyph = h.post("/sessions", {{"query", "char \"\xe9\xb9\xa4\" ; task global ; base: solid red"}});
    REQUIRE(glyph);
    CHECK(glyph->status == 400);
    CHECK(json::parse(glyph->body)["error"] == "MissingGlyph");

    CHECK(h.client.Get("/sessions/" + new_uuid())->status == 404);
    CHECK(h.client.Get("/sessions/nonsense")->status == 404);
    const json list = json::parse(h.get_ok("/sessions"));
    CHECK(list["sessions"].size() == 3);
}

TEST_CASE("http: generate with an explicit seed is reproducible") {
    Harness h;
    const std::string id = h.new_session();
    const json a = h.post_ok("/sessions/" + id + "/generate", {{"seed", 42}, {"regions", {kLeft, kRight}}});
    const json b = h.post_ok("/sessions/" + id + "/generate", {{"seed", "42"}, {"regions", {kLeft, kRight}}});
    CHECK(a["history_index"] == 0);
    CHECK(b["history_index"] == 1);
    CHECK(h.get_ok(a["image"]) == h.get_ok(b["image"]));
    CHECK(h.get_ok(a["trajectory"]) == h.get_ok(b["trajectory"]));
    const json doc = json::parse(h.get_ok("/sessions/" + id));
    CHECK(doc["current"] == 1);
    CHECK(doc["history"][0]["op"]["seed"] == "42");
    CHECK(doc["history"][0]["op"]["op"] == "generate");

    // Masks as base64 PNG give the same run as RLE.
    Image left(64, 64, 1);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 32; ++x) left.at(x, y) = 1;
    }
    Image right(64, 64, 1);
    for (int y = 0; y < 64; ++y) {
        for (int x = 32; x < 64; ++x) right.at(x, y) = 1;
    }
    auto as_b64 = [](const Image& m) {
        const auto bytes = png::encode(m);
        return base64(std::string(bytes.begin(), bytes.end()));
    };
    const json c = h.post_ok("/sessions/" + id + "/generate", {{"seed", 42}, {"regions", {as_b64(left), as_b64(right)}}});
    CHECK(h.get_ok(c["image"]) == h.get_ok(a["image"]));
}

TEST_CASE("http: omitted seeds are drawn fresh and recorded") {
    Harness h;
    const std::string id = h.new_session("char \"A\" ; task global ; base: solid red gray-background");
    const json a = h.post_ok("/sessions/" + id + "/generate", json::object());
    const json b = h.post_ok("/sessions/" + id + "/generate", json::object());
    CHECK(a["seed"] != b["seed"]);
    CHECK(h.get_ok(a["image"]) != h.get_ok(b["image"]));
    const json doc = json::parse(h.get_ok("/sessions/" + id));
    CHECK(doc["history"][0]["op"]["seed"] == a["seed"]);
    CHECK(doc["history"][1]["op"]["seed"] == b["seed"]);
    // The recorded seed replays the run.
    const json c = h.post_ok("/sessions/" + id + "/generate", {{"seed", a["seed"]}});
    CHECK(h.get_ok(c["image"]) == h.get_ok(a["image"]));
}

TEST_CASE("http: generate errors") {
    Harness h;
    const std::string id = h.new_session();
    auto overlap = h.post("/sessions/" + id + "/generate", {{"seed", 1}, {"regions", {kLeft, kTop}}});
    REQUIRE(overlap);
    CHECK(overlap->status == 409);
    CHECK(json::parse(overlap->body)["error"] == "OverlappingRegions");
    CHECK(json::parse(overlap->body)["cells"].size() > 0);

    CHECK(h.post("/sessions/" + new_uuid() + "/generate", {{"seed", 1}})->status == 404);
    CHECK(h.post("/sessions/" + id + "/generate", {{"seed", 1}, {"regions", {kLeft}}})->status == 400);
    CHECK(h.post("/sessions/" + id + "/generate", {{"seed", 1}, {"regions", {kLeft, kRight}}, {"count", 5}})->status == 400);
    CHECK(h.post("/sessions/" + id + "/generate", {{"seed", -3}, {"regions", {kLeft, kRight}}})->status == 400);
    CHECK(h.post("/sessions/" + id + "/generate", {{"seed", 1}, {"regions", {"rle:garbage"}}})->status == 400);
    // Failed requests leave no history behind.
    CHECK(json::parse(h.get_ok("/sessions/" + id))["history"].empty());

    const json batch = h.post_ok("/sessions/" + id + "/generate", {{"seed", 7}, {"regions", {kLeft, kRight}}, {"count", 3}});
    CHECK(batch["results"].size() == 3);
    CHECK(json::parse(h.get_ok("/sessions/" + id))["history"].size() == 3);
}

TEST_CASE("http: edit") {
    Harness h;
    const std::string id = h.new_session();
    const std::string base = "/sessions/" + id;

    auto early = h.post(base + "/edit", {{"regions", {kTop}}, {"region_prompts", {"solid green"}}});
    REQUIRE(early);
    CHECK(early->status == 400);
    CHECK(json::parse(early->body)["error"] == "MissingTrajectory");

    const json g = h.post_ok(base + "/generate", {{"seed", 3}, {"regions", {kLeft, kRight}}});
    const std::string source_png = h.get_ok(g["image"]);

    // All-zero mask: byte-identical image, still appended.
    const json same = h.post_ok(base + "/edit", {{"regions", {kEmpty}}, {"region_prompts", {"solid green"}}, {"seed", 5}});
    CHECK(same["history_index"] == 1);
    CHECK(h.get_ok(same["image"]) == source_png);

    const json e1 = h.post_ok(base + "/edit", {{"regions", {kTop}}, {"region_prompts", {"solid green"}}, {"seed", 5}});
    const json e2 = h.post_ok(base + "/edit", {{"regions", {kTop}}, {"region_prompts", {{"checker", "blue"}}}, {"seed", 6}});
    CHECK(h.get_ok(e1["image"]) != source_png);

    std::vector<std::string> before;
    for (int n = 0; n < 4; ++n) before.push_back(h.get_ok(base + "/images/" + std::to_string(n)));

    const json branch = h.post_ok(base + "/edit", {{"history_index", 0}, {"regions", {kTop}}, {"region_prompts", {"solid green"}}, {"seed", 5}});
    CHECK(branch["history_index"] == 4);
    const json doc = json::parse(h.get_ok(base));
    CHECK(doc["history"][4]["op"]["source"] == 0);
    CHECK(doc["history"][3]["op"]["source"] == 2);
    // Same source, mask, prompt and seed: same result.
    CHECK(h.get_ok(branch["image"]) == h.get_ok(e1["image"]));
    for (int n = 0; n < 4; ++n) CHECK(h.get_ok(base + "/images/" + std::to_string(n)) == before[static_cast<std::size_t>(n)]);

    auto missing = h.post(base + "/edit", {{"region_prompts", {"solid green"}}});
    REQUIRE(missing);
    CHECK(missing->status == 400);
    CHECK(json::parse(missing->body)["error"] == "MissingRegions");
    CHECK(h.post(base + "/edit", {{"history_index", 9}, {"regions", {kTop}}})->status == 404);
    CHECK(h.post(base + "/edit", {{"regions", {kTop, kLeft}}, {"region_prompts", {"red", "blue"}}})->status == 409);
    // Prompts default to the bundle's regions.
    CHECK(h.post(base + "/edit", {{"regions", {kLeft, kRight}}, {"seed", 1}})->status == 200);
}

TEST_CASE("http: artifacts are immutable and addressable") {
    Harness h;
    const std::string id = h.new_session();
    const std::string base = "/sessions/" + id;
    h.post_ok(base + "/generate", {{"seed", 11}, {"regions", {kLeft, kRight}}});
    const std::string png1 = h.get_ok(base + "/images/0");
    CHECK(h.get_ok(base + "/images/0") == png1);
    CHECK(h.client.Get(base + "/images/1")->status == 404);
    CHECK(h.client.Get(base + "/images/x")->status == 404);
    CHECK(h.client.Get(base + "/trajectories/3")->status == 404);

    const std::string traj = h.get_ok(base + "/trajectories/0");
    const sampler::Trajectory t = sampler::decode_trajectory(std::vector<std::uint8_t>(traj.begin(), traj.end()));
    CHECK(t.seed == 11);
    CHECK_NOTHROW(sampler::validate(t));

    const std::string rgba = h.get_ok(base + "/images/0?alpha=1");
    const Image a = png::decode(std::vector<std::uint8_t>(rgba.begin(), rgba.end()));
    CHECK(a.channels == 4);

    const json doc = json::parse(h.get_ok(base));
    for (const json& e : doc["history"]) {
        CHECK(h.store.contains(e["image"].get<std::string>()));
        CHECK(h.store.contains(e["trajectory"].get<std::string>()));
    }
    CHECK(h.store.contains(doc["glyph"].get<std::string>()));
    CHECK(h.store.contains(doc["depth"].get<std::string>()));
}

TEST_CASE("http: import inverts an uploaded image") {
    Harness h;
    const std::string id = h.new_session("char \"A\" ; task global ; base: solid red gray-background");
    const std::string base = "/sessions/" + id;
    const json g = h.post_ok(base + "/generate", {{"seed", 2}, {"steps", 8}});
    const std::string png_bytes = h.get_ok(g["image"]);
    const json imp = h.post_ok(base + "/import", {{"image", base64(png_bytes)}, {"steps", 8}});
    CHECK(imp["history_index"] == 1);
    auto raw = h.client.Post(base + "/import?steps=8", png_bytes, "image/png");
    REQUIRE(raw);
    CHECK(raw->status == 200);
    CHECK(h.get_ok(json::parse(raw->body)["trajectory"]) == h.get_ok(imp["trajectory"]));
    CHECK(h.post(base + "/import", {{"image", "aGVsbG8="}})->status == 400);
}

TEST_CASE("http: concurrent generates on one session are serialized") {
    Harness h;
    const std::string a = h.new_session("char \"A\" ; task global ; base: solid red gray-background");
    const std::string b = h.new_session("char \"B\" ; task global ; base: dots blue gray-background");
    std::vector<std::thread> workers;
    std::atomic<int> failures{0};
    for (int i = 0; i < 6; ++i) {
        workers.emplace_back([&, i] {
            httplib::Client c("127.0.0.1", h.port);
            c.set_read_timeout(60, 0);
            const std::string id = i % 3 == 2 ? b : a;
            auto r = c.Post("/sessions/" + id + "/generate", json{{"seed", i}, {"steps", 4}}.dump(), "application/json");
            if (!r || r->status != 200) ++failures;
        });
    }
    for (auto& w : workers) w.join();
    CHECK(failures == 0);
    const json da = json::parse(h.get_ok("/sessions/" + a));
    const json db = json::parse(h.get_ok("/sessions/" + b));
    CHECK(da["history"].size() == 4);
    CHECK(db["history"].size() == 2);
    std::set<std::string> seeds;
    for (const json& e : da["history"]) seeds.insert(e["op"]["seed"].get<std::string>());
    CHECK(seeds == std::set<std::string>{"0", "1", "3", "4"});
}

// ---------------------------------------------------------------------------
// CLI

namespace {

std::string slurp(const std::filesystem::path& p) {
    const auto bytes = read_file(p);
    return std::string(bytes.begin(), bytes.end());
}

}  // namespace

TEST_CASE("cli: gen -> edit -> edit matches the HTTP path byte for byte") {
    TempDir dir("cli");
    const std::string cli = wordcraft::testing::cli_path().string();
    std::ofstream(dir / "p.txt") << kTwoRegions;
    std::ofstream(dir / "left.rle") << kLeft;
    const std::vector<std::string> env = {kCheckpointEnv + random_checkpoint()};
    REQUIRE(wordcraft::testing::run_command({cli, "gen", "--prompt-file", (dir / "p.txt").string(), "--seed", "77", "--mask",
                                             (dir / "left.rle").string(), "--mask", kRight, "--out", (dir / "0.png").string(),
                                             "--traj", (dir / "0.wctj").string()},
                                            env) == 0);
    REQUIRE(wordcraft::testing::run_command({cli, "edit", "--traj", (dir / "0.wctj").string(), "--mask", kTop, "--region", "1",
                                             "solid green", "--seed", "5", "--out", (dir / "1.png").string(), "--traj-out",
                                             (dir / "1.wctj").string()},
                                            env) == 0);
    REQUIRE(wordcraft::testing::run_command({cli, "edit", "--traj", (dir / "1.wctj").string(), "--mask", kLeft, "--mask", kRight,
                                             "--region", "1", "checker gray", "--region", "2", "stripes blue", "--seed",
                                             "6", "--out", (dir / "2.png").string(), "--traj-out", (dir / "2.wctj").string()},
                                            env) == 0);

    Harness h;
    const std::string id = h.new_session();
    const std::string base = "/sessions/" + id;
    h.post_ok(base + "/generate", {{"seed", "77"}, {"regions", {kLeft, kRight}}});
    h.post_ok(base + "/edit", {{"regions", {kTop}}, {"region_prompts", {"solid green"}}, {"seed", 5}});
    h.post_ok(base + "/edit", {{"regions", {kLeft, kRight}}, {"region_prompts", {"checker gray", "stripes blue"}}, {"seed", 6}});
    for (int n = 0; n < 3; ++n) {
        CHECK(h.get_ok(base + "/images/" + std::to_string(n)) == slurp(dir / (std::to_string(n) + ".png")));
        CHECK(h.get_ok(base + "/trajectories/" + std::to_string(n)) == slurp(dir / (std::to_string(n) + ".wctj")));
    }
}

TEST_CASE("cli: parse mirrors POST /parse; exit codes") {
    TempDir dir("cli");
    const std::string cli = wordcraft::testing::cli_path().string();
    std::ofstream(dir / "q.txt") << kTwoRegions;
    CHECK(wordcraft::testing::run_command({"/bin/sh", "-c", cli + " parse < " + (dir / "q.txt").string() + " > " + (dir / "out.json").string()}) == 0);
    Harness h;
    CHECK(json::parse(slurp(dir / "out.json")) == h.post_ok("/parse", {{"query", kTwoRegions}}));

    CHECK(wordcraft::testing::run_command({cli, "parse", "char \"A\" ; bogus"}) == 1);
    CHECK(wordcraft::testing::run_command({cli, "gen", "--prompt-file", (dir / "missing.txt").string(), "--out",
                                           (dir / "x.png").string()}) == 2);
    CHECK(wordcraft::testing::run_command({cli, "gen", "--prompt-file", (dir / "q.txt").string(), "--mask", kLeft, "--mask", kTop,
                                           "--seed", "1", "--out", (dir / "x.png").string()}) == 1);
    CHECK(wordcraft::testing::run_command({cli, "eval", "--checkpoint", (dir / "none.wcck").string()}) == 2);
    CHECK(wordcraft::testing::run_command({cli, "frobnicate"}) == 1);
    CHECK(wordcraft::testing::run_command({cli, "glyph", "AB", "--out", (dir / "g.png").string(), "--depth", (dir / "d.png").string()}) == 0);
    CHECK(png::decode(read_file(dir / "g.png")).width == 64);
}

TEST_CASE("crash-restart lists exactly the committed history") {
    for (const char* fault : {"WORDCRAFT_FAULT=after-artifacts:4", "WORDCRAFT_FAULT=during-index:4"}) {
        INFO(fault);
        TempDir store("crash");
        std::string id;
        {
            // Commits: create (1), generate (2), edit (3); the second edit (4) dies.
            wordcraft::testing::ServerProcess server(store.path(), {fault, kCheckpointEnv + random_checkpoint()});
            httplib::Client c("127.0.0.1", server.port());
            c.set_read_timeout(60, 0);
            auto s = c.Post("/sessions", json{{"query", kTwoRegions}}.dump(), "application/json");
            REQUIRE(s);
            id = json::parse(s->body)["session_id"];
            REQUIRE(c.Post("/sessions/" + id + "/generate", json{{"seed", 1}, {"regions", {kLeft, kRight}}}.dump(), "application/json")->status == 200);
            REQUIRE(c.Post("/sessions/" + id + "/edit", json{{"seed", 2}, {"regions", {kTop}}, {"region_prompts", {"solid green"}}}.dump(), "application/json")->status == 200);
            auto dead = c.Post("/sessions/" + id + "/edit", json{{"seed", 3}, {"regions", {kTop}}, {"region_prompts", {"solid blue"}}}.dump(), "application/json");
            CHECK_FALSE(dead);
            CHECK(server.wait_exit() == 86);
        }
        wordcraft::testing::ServerProcess server(store.path(), {kCheckpointEnv + random_checkpoint()});
        httplib::Client c("127.0.0.1", server.port());
        const json list = json::parse(c.Get("/sessions")->body);
        CHECK(list["sessions"] == json::array({id}));
        const json doc = json::parse(c.Get("/sessions/" + id)->body);
        REQUIRE(doc["history"].size() == 2);
        CHECK(doc["history"][0]["op"]["op"] == "generate");
        CHECK(doc["history"][1]["op"]["seed"] == "2");
        for (int n = 0; n < 2; ++n) CHECK(c.Get("/sessions/" + id + "/images/" + std::to_string(n))->status == 200);
        CHECK(c.Get("/sessions/" + id + "/images/2")->status == 404);
        for (const auto& e : std::filesystem::recursive_directory_iterator(store.path())) {
            CHECK(e.path().filename().string().rfind(".tmp-", 0) != 0);
        }
    }
}
