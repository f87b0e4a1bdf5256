// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wordcraft::service {

/// Writes `bytes` to a temporary sibling, flushes it and renames it over `path`.
void atomic_write(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Content-addressed artifacts under `<root>/objects`, named `<sha256>.<ext>`,
/// and session index files under `<root>/sessions`.
class ArtifactStore {
public:
    explicit ArtifactStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    /// Stores `bytes` and returns the reference `<sha256>.<ext>`. Idempotent.
    std::string put(std::span<const std::uint8_t> bytes, std::string_view ext);
    std::vector<std::uint8_t> get(std::string_view ref) const;
    bool contains(std::string_view ref) const;

    std::filesystem::path session_path(std::string_view id) const;
    void write_session(std::string_view id, std::string_view document);
    std::optional<std::string> read_session(std::string_view id) const;
    std::vector<std::string> session_ids() const;

    /// Removes leftover temporary files from interrupted writes.
    void sweep_temporaries();

private:
    std::filesystem::path object_path(std::string_view ref) const;

    std::filesystem::path root_;
};

/// Random RFC 4122 version 4 UUID.
std::string new_uuid();
bool is_uuid(std::string_view s);

}  // namespace wordcraft::service
