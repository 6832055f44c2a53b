// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "dcm/common.hpp"

namespace dcm {

/// Append-only record file: one hex-encoded canonical record per line,
/// fsynced on every append so replay after a crash sees every acknowledged
/// record. Replaying the file reconstructs the owning module's state.
class Journal {
  public:
    Journal() = default;
    ~Journal();
    Journal(Journal&& other) noexcept;
    Journal& operator=(Journal&& other) noexcept;
    Journal(const Journal&) = delete;
    Journal& operator=(const Journal&) = delete;

    static Result<Journal> open(const std::filesystem::path& path);

    Result<void> append(ByteSpan record);

    [[nodiscard]] bool is_open() const { return fd_ >= 0; }
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

    static Result<std::vector<Bytes>> read_all(const std::filesystem::path& path);

  private:
    int fd_ = -1;
    std::filesystem::path path_;
};

}  // namespace dcm
