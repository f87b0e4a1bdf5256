// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/service/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <random>

#include "wordcraft/digest.hpp"
#include "wordcraft/image.hpp"
#include "wordcraft/service/errors.hpp"

namespace wordcraft::service {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kTempPrefix = ".tmp-";

std::string random_hex(int bytes) {
    static thread_local std::mt19937_64 rng(std::random_device{}());
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < bytes; ++i) {
        const unsigned v = static_cast<unsigned>(rng() & 0xff);
        out += digits[v >> 4];
        out += digits[v & 15];
    }
    return out;
}

[[noreturn]] void io_error(const std::string& what, const fs::path& path) {
    throw ServiceError(ServiceErrc::Io, what + " " + path.string() + ": " + std::strerror(errno));
}

bool valid_ref(std::string_view ref) {
    const auto dot = ref.find('.');
    if (dot != 64 || ref.size() < 66 || ref.size() > 80) return false;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const char c = ref[i];
        const bool hex = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
        const bool ext = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z');
        if (i < 64 ? !hex : (i != 64 && !ext)) return false;
    }
    return true;
}

}  // namespace

void atomic_write(const fs::path& path, std::span<const std::uint8_t> bytes) {
    const fs::path temp = path.parent_path() / (std::string(kTempPrefix) + path.filename().string() + "-" + random_hex(6));
    const int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
    if (fd < 0) io_error("cannot create", temp);
    std::size_t done = 0;
    while (done < bytes.size()) {
        const ssize_t n = ::write(fd, bytes.data() + done, bytes.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            ::close(fd);
            ::unlink(temp.c_str());
            io_error("cannot write", temp);
        }
        done += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0 || ::close(fd) != 0) {
        ::unlink(temp.c_str());
        io_error("cannot flush", temp);
    }
    std::error_code ec;
    fs::rename(temp, path, ec);
    if (ec) {
        ::unlink(temp.c_str());
        throw ServiceError(ServiceErrc::Io, "cannot rename " + temp.string() + ": " + ec.message());
    }
}

ArtifactStore::ArtifactStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_ / "objects", ec);
    if (!ec) fs::create_directories(root_ / "sessions", ec);
    if (ec) throw ServiceError(ServiceErrc::Io, "cannot create store at " + root_.string() + ": " + ec.message());
}

fs::path ArtifactStore::object_path(std::string_view ref) const {
    if (!valid_ref(ref)) throw ServiceError(ServiceErrc::NotFound, "malformed artifact reference '" + std::string(ref) + "'");
    return root_ / "objects" / std::string(ref);
}

std::string ArtifactStore::put(std::span<const std::uint8_t> bytes, std::string_view ext) {
    const std::string ref = sha256_hex(bytes) + "." + std::string(ext);
    const fs::path path = object_path(ref);
    if (!fs::exists(path)) atomic_write(path, bytes);
    return ref;
}

std::vector<std::uint8_t> ArtifactStore::get(std::string_view ref) const {
    const fs::path path = object_path(ref);
    if (!fs::exists(path)) throw ServiceError(ServiceErrc::NotFound, "no artifact " + std::string(ref));
    try {
        return read_file(path);
    } catch (const ImageError& e) {
        throw ServiceError(ServiceErrc::Io, e.what());
    }
}

bool ArtifactStore::contains(std::string_view ref) const { return valid_ref(ref) && fs::exists(object_path(ref)); }

fs::path ArtifactStore::session_path(std::string_view id) const {
    if (!is_uuid(id)) throw ServiceError(ServiceErrc::NotFound, "no session " + std::string(id));
    return root_ / "sessions" / (std::string(id) + ".json");
}

void ArtifactStore::write_session(std::string_view id, std::string_view document) {
    atomic_write(session_path(id), {reinterpret_cast<const std::uint8_t*>(document.data()), document.size()});
}

std::optional<std::string> ArtifactStore::read_session(std::string_view id) const {
    const fs::path path = session_path(id);
    if (!fs::exists(path)) return std::nullopt;
    const auto bytes = read_file(path);
    return std::string(bytes.begin(), bytes.end());
}

std::vector<std::string> ArtifactStore::session_ids() const {
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(root_ / "sessions")) {
        if (entry.path().extension() == ".json" && is_uuid(entry.path().stem().string())) ids.push_back(entry.path().stem().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

void ArtifactStore::sweep_temporaries() {
    for (const char* dir : {"objects", "sessions"}) {
        for (const auto& entry : fs::directory_iterator(root_ / dir)) {
            if (entry.path().filename().string().rfind(kTempPrefix, 0) == 0) {
                std::error_code ec;
                fs::remove(entry.path(), ec);
            }
        }
    }
}

std::string new_uuid() {
    std::string hex = random_hex(16);
    hex[12] = '4';
    hex[16] = "89ab"[std::stoi(hex.substr(16, 1), nullptr, 16) & 3];
    return hex.substr(0, 8) + "-" + hex.substr(8, 4) + "-" + hex.substr(12, 4) + "-" + hex.substr(16, 4) + "-" + hex.substr(20);
}

bool is_uuid(std::string_view s) {
    if (s.size() != 36) return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (i == 8 || i == 13 || i == 18 || i == 23) {
            if (c != '-') return false;
        } else if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
            return false;
        }
    }
    return true;
}

}  // namespace wordcraft::service
