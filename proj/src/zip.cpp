// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/zip.hpp"

#include <array>

namespace dcm::package {

namespace {

constexpr uint32_t kLocalHeaderSig = 0x04034b50;
constexpr uint32_t kCentralDirSig = 0x02014b50;
constexpr uint32_t kEndOfCentralDirSig = 0x06054b50;
constexpr uint16_t kVersion = 20;

std::array<uint32_t, 256> make_crc_table() {
    std::array<uint32_t, 256> table{};
    for (uint32_t i = 0; i < 256; ++i) {
        uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
        }
        table[i] = c;
    }
    return table;
}

void put_u16(Bytes& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(Bytes& out, uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<uint8_t>(v >> shift));
    }
}

struct Reader {
    ByteSpan data;
    size_t pos = 0;
    bool bad = false;

    uint16_t u16() {
        if (bad || data.size() - pos < 2) {
            bad = true;
            return 0;
        }
        uint16_t v = static_cast<uint16_t>(data[pos] | (data[pos + 1] << 8));
        pos += 2;
        return v;
    }
    uint32_t u32() {
        if (bad || data.size() - pos < 4) {
            bad = true;
            return 0;
        }
        uint32_t v = 0;
        for (int i = 3; i >= 0; --i) {
            v = (v << 8) | data[pos + static_cast<size_t>(i)];
        }
        pos += 4;
        return v;
    }
    ByteSpan raw(size_t n) {
        if (bad || data.size() - pos < n) {
            bad = true;
            return {};
        }
        ByteSpan out = data.subspan(pos, n);
        pos += n;
        return out;
    }
};

}  // namespace

uint32_t crc32(ByteSpan data) {
    static const auto table = make_crc_table();
    uint32_t c = 0xffffffffu;
    for (uint8_t b : data) {
        c = table[(c ^ b) & 0xff] ^ (c >> 8);
    }
    return c ^ 0xffffffffu;
}

Bytes zip_pack(const std::vector<ZipEntry>& entries) {
    Bytes out;
    std::vector<uint32_t> offsets;
    std::vector<uint32_t> crcs;
    offsets.reserve(entries.size());
    crcs.reserve(entries.size());

    for (const ZipEntry& entry : entries) {
        offsets.push_back(static_cast<uint32_t>(out.size()));
        uint32_t crc = crc32(entry.data);
        crcs.push_back(crc);
        put_u32(out, kLocalHeaderSig);
        put_u16(out, kVersion);
        put_u16(out, 0);  // flags
        put_u16(out, 0);  // method: stored
        put_u16(out, 0);  // mod time
        put_u16(out, 0);  // mod date
        put_u32(out, crc);
        put_u32(out, static_cast<uint32_t>(entry.data.size()));
        put_u32(out, static_cast<uint32_t>(entry.data.size()));
        put_u16(out, static_cast<uint16_t>(entry.name.size()));
        put_u16(out, 0);  // extra length
        out.insert(out.end(), entry.name.begin(), entry.name.end());
        out.insert(out.end(), entry.data.begin(), entry.data.end());
    }

    const uint32_t central_start = static_cast<uint32_t>(out.size());
    for (size_t i = 0; i < entries.size(); ++i) {
        const ZipEntry& entry = entries[i];
        put_u32(out, kCentralDirSig);
        put_u16(out, kVersion);  // made by
        put_u16(out, kVersion);  // needed
        put_u16(out, 0);         // flags
        put_u16(out, 0);         // method
        put_u16(out, 0);         // time
        put_u16(out, 0);         // date
        put_u32(out, crcs[i]);
        put_u32(out, static_cast<uint32_t>(entry.data.size()));
        put_u32(out, static_cast<uint32_t>(entry.data.size()));
        put_u16(out, static_cast<uint16_t>(entry.name.size()));
        put_u16(out, 0);  // extra
        put_u16(out, 0);  // comment
        put_u16(out, 0);  // disk
        put_u16(out, 0);  // internal attrs
        put_u32(out, 0);  // external attrs
        put_u32(out, offsets[i]);
        out.insert(out.end(), entry.name.begin(), entry.name.end());
    }
    const uint32_t central_size = static_cast<uint32_t>(out.size()) - central_start;

    put_u32(out, kEndOfCentralDirSig);
    put_u16(out, 0);  // disk
    put_u16(out, 0);  // central dir disk
    put_u16(out, static_cast<uint16_t>(entries.size()));
    put_u16(out, static_cast<uint16_t>(entries.size()));
    put_u32(out, central_size);
    put_u32(out, central_start);
    put_u16(out, 0);  // comment length
    return out;
}

Result<std::vector<ZipEntry>> zip_unpack(ByteSpan archive) {
    using Out = Result<std::vector<ZipEntry>>;
    // End-of-central-directory record: fixed 22 bytes with an empty comment.
    if (archive.size() < 22) {
        return Out::failure(Err::MalformedInput, "archive too small");
    }
    size_t eocd = archive.size() - 22;
    Reader end{archive, eocd};
    if (end.u32() != kEndOfCentralDirSig) {
        return Out::failure(Err::MalformedInput, "missing end-of-central-directory record");
    }
    end.u16();
    end.u16();
    uint16_t count = end.u16();
    end.u16();
    end.u32();
    uint32_t central_start = end.u32();
    if (end.bad || central_start > archive.size()) {
        return Out::failure(Err::MalformedInput, "corrupt end-of-central-directory record");
    }

    std::vector<ZipEntry> entries;
    Reader dir{archive, central_start};
    for (uint16_t i = 0; i < count; ++i) {
        if (dir.u32() != kCentralDirSig) {
            return Out::failure(Err::MalformedInput, "corrupt central directory");
        }
        dir.u16();
        dir.u16();
        dir.u16();
        uint16_t method = dir.u16();
        dir.u16();
        dir.u16();
        dir.u32();  // crc
        uint32_t csize = dir.u32();
        uint32_t usize = dir.u32();
        uint16_t name_len = dir.u16();
        uint16_t extra_len = dir.u16();
        uint16_t comment_len = dir.u16();
        dir.u16();
        dir.u16();
        dir.u32();
        uint32_t local_offset = dir.u32();
        ByteSpan name_raw = dir.raw(name_len);
        dir.raw(static_cast<size_t>(extra_len) + comment_len);
        if (dir.bad || method != 0 || csize != usize) {
            return Out::failure(Err::MalformedInput, "unsupported or corrupt zip entry");
        }

        Reader local{archive, local_offset};
        if (local.u32() != kLocalHeaderSig) {
            return Out::failure(Err::MalformedInput, "corrupt local file header");
        }
        local.u16();
        local.u16();
        local.u16();
        local.u16();
        local.u16();
        local.u32();
        local.u32();
        uint32_t local_size = local.u32();
        uint16_t local_name_len = local.u16();
        uint16_t local_extra_len = local.u16();
        local.raw(local_name_len);
        local.raw(local_extra_len);
        ByteSpan payload = local.raw(local_size);
        if (local.bad || local_size != usize) {
            return Out::failure(Err::MalformedInput, "corrupt local file header");
        }

        ZipEntry entry;
        entry.name.assign(reinterpret_cast<const char*>(name_raw.data()), name_raw.size());
        entry.data.assign(payload.begin(), payload.end());
        entries.push_back(std::move(entry));
    }
    return Out::success(std::move(entries));
}

}  // namespace dcm::package
