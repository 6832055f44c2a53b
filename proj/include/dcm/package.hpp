// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// Signed application packages: a zip archive of content files plus a
// DCM-META/ directory holding the digest manifest, the developer's signature
// block, and the certificate chain.

#pragma once

#include <filesystem>
#include <string>

#include "dcm/common.hpp"
#include "dcm/crypto.hpp"
#include "dcm/trust.hpp"
#include "dcm/zip.hpp"

namespace dcm::package {

inline constexpr std::string_view kMetaPrefix = "DCM-META/";
inline constexpr std::string_view kManifestEntry = "DCM-META/manifest.bin";
inline constexpr std::string_view kSignatureEntry = "DCM-META/sig.bin";
inline constexpr std::string_view kChainEntry = "DCM-META/chain.bin";

struct ManifestEntry {
    std::string path;
    Hash32 digest{};  // over the exact file bytes
    uint64_t size = 0;

    bool operator==(const ManifestEntry&) const = default;
};

struct PackageManifest {
    std::string package_name;  // reverse-dns
    uint64_t version_code = 0;
    std::vector<ManifestEntry> files;  // sorted by path, paths unique

    bool operator==(const PackageManifest&) const = default;
};

Bytes serialize_manifest(const PackageManifest& manifest);
Result<PackageManifest> decode_manifest(ByteSpan data);

struct SignatureBlock {
    Hash32 manifest_digest{};     // digest of the serialized manifest
    crypto::Signature signature;  // by the developer key, over manifest_digest
    trust::CertificateChain chain;

    bool operator==(const SignatureBlock&) const = default;
};

struct FileInput {
    std::string path;
    Bytes content;
};

struct PackageArchive {
    Bytes zip;

    bool operator==(const PackageArchive&) const = default;
};

Result<PackageManifest> build_manifest(std::string package_name, uint64_t version_code,
                                       const std::vector<FileInput>& files);

/// Packs content files (sorted by path) and the metadata entries into a
/// reproducible archive. The manifest is signed as given, so a caller can
/// deliberately produce an archive whose content no longer matches it.
Result<PackageArchive> sign_package(const std::vector<FileInput>& files,
                                    const PackageManifest& manifest,
                                    const crypto::SigningKey& developer_secret,
                                    const trust::CertificateChain& chain);

struct PackageMetadata {
    PackageManifest manifest;
    SignatureBlock signature_block;
};

/// Parses the DCM-META entries; content verification is the verifier's job.
Result<PackageMetadata> extract_metadata(const PackageArchive& archive);

/// Every entry outside DCM-META/.
Result<std::vector<FileInput>> content_files(const PackageArchive& archive);

Result<void> write_package_file(const std::filesystem::path& path, const PackageArchive& archive);
Result<PackageArchive> read_package_file(const std::filesystem::path& path);

}  // namespace dcm::package
