// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

// wordcraft: command-line front end over the same engine the HTTP service uses.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wordcraft/glyph/prepare.hpp"
#include "wordcraft/glyph/truetype.hpp"
#include "wordcraft/image.hpp"
#include "wordcraft/model/checkpoint.hpp"
#include "wordcraft/model/dataset.hpp"
#include "wordcraft/model/train.hpp"
#include "wordcraft/prompt/document.hpp"
#include "wordcraft/prompt/grammar.hpp"
#include "wordcraft/sampler/evaluate.hpp"
#include "wordcraft/service/engine.hpp"
#include "wordcraft/service/errors.hpp"
#include "wordcraft/service/http.hpp"
#include "wordcraft/service/session.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wordcraft;

namespace {

constexpr double kRequiredRegional = 0.90;
constexpr double kRequiredGlobal = 0.95;

std::string default_font() { return std::string(WORDCRAFT_DEFAULT_FONT_DIR) + "/DejaVuSans-Bold-subset.ttf"; }

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : fallback;
}

std::string read_text(const std::string& path) {
    if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
    const auto bytes = read_file(path);
    return std::string(bytes.begin(), bytes.end());
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    if (!path.empty()) write_file(path, bytes);
}

// A bundle file is either a JSON document or the structured query form.
prompt::PromptBundle read_bundle(const std::string& path) {
    const std::string text = read_text(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return prompt::validate_document(std::string_view(text));
    return prompt::parse_structured(text);
}

// Mask arguments are inline `rle:` strings or PNG paths.
std::string read_mask(const std::string& arg) {
    if (arg.rfind("rle:", 0) == 0) return arg;
    const std::string text = read_text(arg);
    return text.rfind("rle:", 0) == 0 ? text.substr(0, text.find_last_not_of(" \r\n") + 1) : text;
}

std::uint64_t seed_or_entropy(const std::string& text) {
    if (!text.empty()) return service::parse_seed(text);
    const std::uint64_t s = service::entropy_seed();
    std::cerr << "seed " << s << "\n";
    return s;
}

int exit_code(const service::Failure& f) { return f.kind == service::ServiceErrc::Io ? 2 : 1; }

std::atomic<service::HttpServer*> running_server{nullptr};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regional text-effect generation and editing"};
    app.require_subcommand(1);

    std::string checkpoint = env_or("WORDCRAFT_CHECKPOINT", "");

    // parse
    auto* parse = app.add_subcommand("parse", "Turn a query into a prompt bundle document");
    std::string parse_query;
    bool use_llm = false;
    std::string llm_config;
    parse->add_option("query", parse_query, "Query text; read from stdin when omitted");
    parse->add_flag("--use-llm", use_llm, "Decompose through the configured LLM endpoint");
    parse->add_option("--llm-config", llm_config, "Endpoint adapter config (JSON)");

    // glyph
    auto* glyph_cmd = app.add_subcommand("glyph", "Rasterize text and compute its depth map");
    std::string glyph_text, font_path = default_font(), glyph_out, depth_out;
    int glyph_size = 64;
    glyph_cmd->add_option("text", glyph_text)->required();
    glyph_cmd->add_option("--font", font_path);
    glyph_cmd->add_option("--size", glyph_size);
    glyph_cmd->add_option("--out", glyph_out, "Coverage PNG")->required();
    glyph_cmd->add_option("--depth", depth_out, "16-bit depth PNG");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate an image from a prompt bundle");
    std::string prompt_file, seed_text, out_png, traj_out, alpha_out;
    int steps = 32;
    std::vector<std::string> gen_masks;
    gen->add_option("--prompt-file", prompt_file, "Bundle document (JSON) or structured query; - for stdin")->required();
    gen->add_option("--font", font_path);
    gen->add_option("--seed", seed_text);
    gen->add_option("--steps", steps);
    gen->add_option("--mask", gen_masks, "Region mask (PNG path or rle: string), one per bundle region");
    gen->add_option("--out", out_png)->required();
    gen->add_option("--traj", traj_out);
    gen->add_option("--alpha", alpha_out, "Also write an RGBA PNG with a transparent background");
    gen->add_option("--checkpoint", checkpoint);

    // edit
    auto* edit = app.add_subcommand("edit", "Regenerate masked regions of a stored trajectory");
    std::string traj_in;
    std::vector<std::string> edit_masks, region_args;
    edit->add_option("--traj", traj_in, "Source trajectory")->required();
    edit->add_option("--mask", edit_masks, "Region mask (PNG path or rle: string)")->required();
    edit->add_option("--region", region_args, "Region index (1-based) and its prompt")->type_size(2);
    edit->add_option("--seed", seed_text);
    edit->add_option("--out", out_png)->required();
    edit->add_option("--traj-out", traj_out);
    edit->add_option("--alpha", alpha_out);
    edit->add_option("--checkpoint", checkpoint);

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the denoiser on the synthetic style set");
    model::TrainConfig tc;
    int examples = 4000;
    std::uint64_t data_seed = 11;
    std::string train_out, export_dir;
    train_cmd->add_option("--out", train_out)->required();
    train_cmd->add_option("--steps", tc.steps);
    train_cmd->add_option("--batch", tc.batch);
    train_cmd->add_option("--lr", tc.lr);
    train_cmd->add_option("--time-limit", tc.time_limit_seconds, "Seconds; 0 for no limit");
    train_cmd->add_option("--examples", examples);
    train_cmd->add_option("--data-seed", data_seed);
    train_cmd->add_option("--font", font_path);
    train_cmd->add_option("--export-data", export_dir, "Also write the training set to this directory");

    // eval
    auto* eval = app.add_subcommand("eval", "Region-style accuracy over a seeded benchmark");
    sampler::BenchmarkOptions bench;
    std::string report_path;
    bool require = false;
    eval->add_option("--checkpoint", checkpoint)->required();
    eval->add_option("--report", report_path);
    eval->add_option("--font", font_path);
    eval->add_option("--regional", bench.regional_cases);
    eval->add_option("--global", bench.global_cases);
    eval->add_option("--seed", bench.seed);
    eval->add_option("--steps", bench.schedule.steps);
    eval->add_flag("--require", require, "Exit 1 unless the accuracy thresholds are met");

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    std::string config_path, addr, store_dir, font_dir;
    serve->add_option("--config", config_path);
    serve->add_option("--addr", addr, "host:port");
    serve->add_option("--store-dir", store_dir);
    serve->add_option("--checkpoint", checkpoint);
    serve->add_option("--font-dir", font_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*parse) {
            json body = {{"query", parse_query.empty() ? read_text("-") : parse_query}, {"use_llm", use_llm}};
            prompt::EndpointConfig llm;
            if (!llm_config.empty()) llm = prompt::EndpointConfig::from_json(json::parse(read_text(llm_config)));
            std::cout << service::parse_document(body, llm.with_env_overrides()).dump() << "\n";
        } else if (*glyph_cmd) {
            const auto prepared =
                glyph::prepare_text(glyph::Font::from_file(font_path), glyph_text, glyph_size, service::kGlyphMargin);
            write_bytes(glyph_out, png::encode(prepared.coverage));
            if (!depth_out.empty()) write_bytes(depth_out, png::encode(prepared.depth.to_image(), 16));
        } else if (*gen) {
            const service::Engine engine = service::Engine::load(checkpoint);
            const prompt::PromptBundle bundle = read_bundle(prompt_file);
            const auto prepared = engine.prepare(glyph::Font::from_file(font_path), bundle.character);
            service::GenerateParams p;
            p.seed = seed_or_entropy(seed_text);
            p.steps = steps;
            for (const auto& m : gen_masks) p.masks.push_back(read_mask(m));
            const service::RunOutput run = engine.generate(bundle, prepared.depth, p);
            write_bytes(out_png, run.image_png);
            write_bytes(traj_out, run.trajectory_bytes);
            if (!alpha_out.empty()) write_bytes(alpha_out, engine.transparent_png(run.trajectory));
        } else if (*edit) {
            const service::Engine engine = service::Engine::load(checkpoint);
            const sampler::Trajectory source = sampler::decode_trajectory(read_file(traj_in));
            service::EditParams p;
            for (const auto& m : edit_masks) p.masks.push_back(read_mask(m));
            // Unnamed regions keep the prompt they had in the source, when it had one.
            p.prompts.resize(p.masks.size());
            for (std::size_t k = 0; k < p.prompts.size() && k < source.conditioning.regions.size(); ++k) {
                p.prompts[k] = source.conditioning.regions[k];
            }
            for (std::size_t i = 0; i + 1 < region_args.size(); i += 2) {
                const int k = std::stoi(region_args[i]);
                if (k < 1 || static_cast<std::size_t>(k) > p.masks.size()) {
                    throw service::ServiceError(service::ServiceErrc::BadRequest,
                                                "--region " + region_args[i] + " names no mask", {{"code", "MissingRegions"}});
                }
                std::istringstream words(region_args[i + 1]);
                prompt::TokenList tokens;
                for (std::string w; words >> w;) tokens.push_back(w);
                p.prompts[static_cast<std::size_t>(k - 1)] = tokens;
            }
            for (std::size_t k = 0; k < p.prompts.size(); ++k) {
                if (p.prompts[k].empty()) {
                    throw service::ServiceError(service::ServiceErrc::BadRequest,
                                                "region " + std::to_string(k + 1) + " has no prompt", {{"code", "MissingRegions"}});
                }
            }
            p.seed = seed_or_entropy(seed_text);
            const service::RunOutput run = engine.edit(source, p);
            write_bytes(out_png, run.image_png);
            write_bytes(traj_out, run.trajectory_bytes);
            if (!alpha_out.empty()) write_bytes(alpha_out, engine.transparent_png(run.trajectory));
        } else if (*train_cmd) {
            model::DenoiserConfig config;
            const auto glyphs = model::GlyphSet::build(glyph::Font::from_file(font_path), model::default_glyph_texts(),
                                                       config.image_size);
            const auto data = model::synth_dataset(glyphs, examples, data_seed);
            if (!export_dir.empty()) model::export_dataset(data, export_dir);
            model::Denoiser<float> m(config);
            m.initialize(config.seed);
            tc.log_every = 100;
            tc.on_log = [](int step, double loss) { std::fprintf(stderr, "step %d loss %.4f\n", step, loss); };
            const model::TrainResult r = model::train(m, data, tc);
            model::save_checkpoint(m, train_out,
                                   {{"steps", r.steps_run}, {"seconds", r.seconds}, {"final_loss", r.final_loss},
                                    {"examples", examples}, {"data_seed", data_seed}});
            std::fprintf(stderr, "trained %d steps in %.1f s, final loss %.4f\n", r.steps_run, r.seconds, r.final_loss);
        } else if (*eval) {
            const model::Denoiser<float> m = model::load_checkpoint(checkpoint);
            const auto glyphs = model::GlyphSet::build(glyph::Font::from_file(font_path), model::default_glyph_texts(),
                                                       m.config().image_size);
            const sampler::BenchmarkReport report = sampler::run_benchmark(m, glyphs, bench);
            json j = report.to_json();
            j["required"] = {{"regional", kRequiredRegional}, {"global", kRequiredGlobal}};
            const bool pass = report.regional_accuracy() >= kRequiredRegional && report.global_accuracy() >= kRequiredGlobal;
            j["pass"] = pass;
            const std::string text = j.dump(2) + "\n";
            if (!report_path.empty()) write_bytes(report_path, std::vector<std::uint8_t>(text.begin(), text.end()));
            std::cout << text;
            if (require && !pass) return 1;
        } else if (*serve) {
            service::ServiceConfig config =
                config_path.empty() ? service::ServiceConfig{} : service::ServiceConfig::from_file(config_path);
            config = config.with_env_overrides();
            if (!addr.empty()) config.set_addr(addr);
            if (!store_dir.empty()) config.store_dir = store_dir;
            if (!checkpoint.empty()) config.checkpoint = checkpoint;
            if (!font_dir.empty()) config.font_dir = font_dir;

            const service::Engine engine = service::Engine::load(config.checkpoint);
            service::FontRegistry fonts;
            fonts.add_directory(config.font_dir);
            service::ArtifactStore store(config.store_dir);
            service::SessionService sessions(store, engine, std::move(fonts), config.llm, service::fault_point_from_env());
            service::HttpServer server(sessions, config.cors_origin);
            const int port = server.bind(config.host, config.port);
            if (port < 0) {
                std::cerr << "cannot bind " << config.host << ":" << config.port << "\n";
                return 2;
            }
            running_server = &server;
            std::signal(SIGINT, [](int) {
                if (auto* s = running_server.load()) s->stop();
            });
            std::signal(SIGTERM, [](int) {
                if (auto* s = running_server.load()) s->stop();
            });
            std::cout << "listening on " << config.host << ":" << port << std::endl;
            const bool ok = server.run();
            running_server = nullptr;
            return ok ? 0 : 2;
        }
    } catch (const std::exception& e) {
        const service::Failure f = service::classify(e);
        std::cerr << "error: " << f.to_json().dump() << "\n";
        return exit_code(f);
    }
    return 0;
}
