// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/package.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "dcm/encoding.hpp"

namespace dcm::package {

Bytes serialize_manifest(const PackageManifest& manifest) {
    enc::Encoder e;
    e.str(manifest.package_name);
    e.u64(manifest.version_code);
    e.u32(static_cast<uint32_t>(manifest.files.size()));
    for (const auto& file : manifest.files) {
        e.str(file.path);
        e.fixed(file.digest);
        e.u64(file.size);
    }
    return e.take();
}

Result<PackageManifest> decode_manifest(ByteSpan data) {
    enc::Decoder d(data);
    PackageManifest manifest;
    manifest.package_name = d.str();
    manifest.version_code = d.u64();
    uint32_t count = d.u32();
    for (uint32_t i = 0; i < count && !d.failed(); ++i) {
        ManifestEntry entry;
        entry.path = d.str();
        entry.digest = d.fixed<32>();
        entry.size = d.u64();
        manifest.files.push_back(std::move(entry));
    }
    if (!d.done()) {
        return Result<PackageManifest>::failure(Err::MalformedMetadata, "malformed manifest");
    }
    return Result<PackageManifest>::success(std::move(manifest));
}

Result<PackageManifest> build_manifest(std::string package_name, uint64_t version_code,
                                       const std::vector<FileInput>& files) {
    using Out = Result<PackageManifest>;
    if (files.empty()) {
        return Out::failure(Err::EmptyPackage, "a package needs at least one file");
    }
    if (package_name.empty() || version_code == 0) {
        return Out::failure(Err::MalformedInput, "package name and a positive version are required");
    }
    PackageManifest manifest;
    manifest.package_name = std::move(package_name);
    manifest.version_code = version_code;

    std::set<std::string> seen;
    for (const auto& file : files) {
        if (file.path.starts_with(kMetaPrefix)) {
            return Out::failure(Err::MalformedInput, "content paths may not live under DCM-META/");
        }
        if (!seen.insert(file.path).second) {
            return Out::failure(Err::DuplicatePath, "duplicate path: " + file.path);
        }
        manifest.files.push_back({file.path, crypto::sha256(file.content), file.content.size()});
    }
    std::sort(manifest.files.begin(), manifest.files.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    return Out::success(std::move(manifest));
}

Result<PackageArchive> sign_package(const std::vector<FileInput>& files,
                                    const PackageManifest& manifest,
                                    const crypto::SigningKey& developer_secret,
                                    const trust::CertificateChain& chain) {
    using Out = Result<PackageArchive>;
    if (chain.empty() || chain.front().body.role != trust::CertificateRole::Developer) {
        return Out::failure(Err::NotADeveloperCert, "chain leaf must be a Developer certificate");
    }
    if (chain.front().body.subject_public_key != developer_secret.verify_key()) {
        return Out::failure(Err::KeyMismatch, "signing key does not pair the chain leaf");
    }

    SignatureBlock block;
    block.manifest_digest = crypto::sha256(serialize_manifest(manifest));
    block.signature = crypto::sign(block.manifest_digest, developer_secret);
    block.chain = chain;

    std::vector<ZipEntry> entries;
    entries.reserve(files.size() + 3);
    for (const auto& file : files) {
        entries.push_back({file.path, file.content});
    }
    std::sort(entries.begin(), entries.end(),
              [](const ZipEntry& a, const ZipEntry& b) { return a.name < b.name; });

    entries.push_back({std::string(kManifestEntry), serialize_manifest(manifest)});
    enc::Encoder sig;
    sig.fixed(block.manifest_digest);
    sig.fixed(block.signature.bytes);
    entries.push_back({std::string(kSignatureEntry), sig.take()});
    entries.push_back({std::string(kChainEntry), trust::serialize_chain(chain)});

    return Out::success(PackageArchive{zip_pack(entries)});
}

Result<PackageMetadata> extract_metadata(const PackageArchive& archive) {
    using Out = Result<PackageMetadata>;
    auto entries = zip_unpack(archive.zip);
    if (!entries) {
        return Out::failure(Err::MalformedMetadata, entries.message);
    }

    const Bytes* manifest_raw = nullptr;
    const Bytes* sig_raw = nullptr;
    const Bytes* chain_raw = nullptr;
    for (const auto& entry : entries.value) {
        if (entry.name == kManifestEntry) manifest_raw = &entry.data;
        if (entry.name == kSignatureEntry) sig_raw = &entry.data;
        if (entry.name == kChainEntry) chain_raw = &entry.data;
    }
    if (manifest_raw == nullptr || sig_raw == nullptr || chain_raw == nullptr) {
        return Out::failure(Err::MissingMetadata, "archive lacks DCM-META entries");
    }

    PackageMetadata meta;
    auto manifest = decode_manifest(*manifest_raw);
    if (!manifest) {
        return forward_failure<PackageMetadata>(manifest);
    }
    meta.manifest = std::move(manifest.value);

    enc::Decoder sig(*sig_raw);
    meta.signature_block.manifest_digest = sig.fixed<32>();
    meta.signature_block.signature.bytes = sig.fixed<64>();
    if (!sig.done()) {
        return Out::failure(Err::MalformedMetadata, "malformed signature block");
    }

    auto chain = trust::decode_chain(*chain_raw);
    if (!chain) {
        return Out::failure(Err::MalformedMetadata, chain.message);
    }
    meta.signature_block.chain = std::move(chain.value);
    return Out::success(std::move(meta));
}

Result<std::vector<FileInput>> content_files(const PackageArchive& archive) {
    auto entries = zip_unpack(archive.zip);
    if (!entries) {
        return forward_failure<std::vector<FileInput>>(entries);
    }
    std::vector<FileInput> files;
    for (auto& entry : entries.value) {
        if (!entry.name.starts_with(kMetaPrefix)) {
            files.push_back({std::move(entry.name), std::move(entry.data)});
        }
    }
    return Result<std::vector<FileInput>>::success(std::move(files));
}

Result<void> write_package_file(const std::filesystem::path& path, const PackageArchive& archive) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        return Result<void>::failure(Err::IoError, "cannot open " + path.string());
    }
    out.write(reinterpret_cast<const char*>(archive.zip.data()),
              static_cast<std::streamsize>(archive.zip.size()));
    if (!out) {
        return Result<void>::failure(Err::IoError, "write failed: " + path.string());
    }
    return Result<void>::success();
}

Result<PackageArchive> read_package_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return Result<PackageArchive>::failure(Err::IoError, "cannot open " + path.string());
    }
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return Result<PackageArchive>::success(PackageArchive{std::move(data)});
}

}  // namespace dcm::package
