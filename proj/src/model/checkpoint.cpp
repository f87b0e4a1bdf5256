// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/model/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "wordcraft/image.hpp"

namespace wordcraft::model {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[at_ + i]) << (8 * i);
        at_ += 4;
        return v;
    }
    std::string string() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + at_), n);
        at_ += n;
        return s;
    }
    std::span<const std::uint8_t> take(std::size_t n) {
        need(n);
        auto s = bytes_.subspan(at_, n);
        at_ += n;
        return s;
    }
    bool done() const { return at_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - at_ < n) throw ModelError(ModelErrc::BadCheckpoint, "truncated checkpoint");
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t at_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Denoiser<float>& model, const nlohmann::json& metadata) {
    std::vector<std::uint8_t> out = {'W', 'C', 'C', 'K'};
    put_u32(out, kCheckpointVersion);
    nlohmann::json echo = model.config().to_json();
    if (!metadata.is_null()) echo["metadata"] = metadata;
    put_string(out, echo.dump());
    put_u32(out, static_cast<std::uint32_t>(model.tensors().size()));
    for (const TensorInfo& t : model.tensors()) {
        put_string(out, t.name);
        put_u32(out, static_cast<std::uint32_t>(t.rows));
        put_u32(out, static_cast<std::uint32_t>(t.cols));
    }
    for (float p : model.parameters()) put_u32(out, std::bit_cast<std::uint32_t>(p));
    return out;
}

Denoiser<float> decode_checkpoint(std::span<const std::uint8_t> bytes, nlohmann::json* metadata) {
    Reader r(bytes);
    const auto magic = r.take(4);
    if (std::memcmp(magic.data(), "WCCK", 4) != 0) throw ModelError(ModelErrc::BadCheckpoint, "not a checkpoint (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        throw ModelError(ModelErrc::BadCheckpoint, "unsupported checkpoint version " + std::to_string(version));
    }
    nlohmann::json echo;
    try {
        echo = nlohmann::json::parse(r.string());
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(ModelErrc::BadCheckpoint, std::string("config echo: ") + e.what());
    }
    DenoiserConfig config;
    try {
        config = DenoiserConfig::from_json(echo);
    } catch (const std::exception& e) {
        throw ModelError(ModelErrc::BadCheckpoint, std::string("config echo: ") + e.what());
    }
    if (metadata) *metadata = echo.value("metadata", nlohmann::json::object());
    Denoiser<float> model(config);
    const std::uint32_t count = r.u32();
    if (count != model.tensors().size()) throw ModelError(ModelErrc::BadCheckpoint, "tensor count does not match config");
    for (const TensorInfo& t : model.tensors()) {
        const std::string name = r.string();
        const std::uint32_t rows = r.u32(), cols = r.u32();
        if (name != t.name || rows != static_cast<std::uint32_t>(t.rows) || cols != static_cast<std::uint32_t>(t.cols)) {
            throw ModelError(ModelErrc::BadCheckpoint, "manifest entry " + name + " does not match " + t.name);
        }
    }
    for (float& p : model.parameters()) p = std::bit_cast<float>(r.u32());
    if (!r.done()) throw ModelError(ModelErrc::BadCheckpoint, "trailing bytes after parameter blob");
    return model;
}

void save_checkpoint(const Denoiser<float>& model, const std::filesystem::path& path, const nlohmann::json& metadata) {
    write_file(path, encode_checkpoint(model, metadata));
}

Denoiser<float> load_checkpoint(const std::filesystem::path& path, nlohmann::json* metadata) {
    return decode_checkpoint(read_file(path), metadata);
}

}  // namespace wordcraft::model
