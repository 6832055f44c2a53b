// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal zip container: stored (uncompressed) entries, zeroed DOS
// timestamps, entries written in the order given. Identical input always
// produces an identical archive.

#pragma once

#include <string>

#include "dcm/common.hpp"

namespace dcm::package {

struct ZipEntry {
    std::string name;
    Bytes data;

    bool operator==(const ZipEntry&) const = default;
};

uint32_t crc32(ByteSpan data);

Bytes zip_pack(const std::vector<ZipEntry>& entries);
Result<std::vector<ZipEntry>> zip_unpack(ByteSpan archive);

}  // namespace dcm::package
