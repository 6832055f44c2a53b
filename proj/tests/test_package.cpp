// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dcm/package.hpp"
#include "dcm/zip.hpp"
#include "helpers.hpp"

using namespace dcm;
using dcmtest::text_bytes;

TEST_CASE("crc32 matches the classic check value") {
    // CRC-32 of "123456789" is the standard check value 0xCBF43926.
    Bytes data = text_bytes("123456789");
    CHECK(package::crc32(data) == 0xCBF43926u);
    CHECK(package::crc32({}) == 0u);
}

TEST_CASE("zip pack/unpack round trip is deterministic") {
    std::vector<package::ZipEntry> entries = {
        {"a.txt", text_bytes("alpha")},
        {"dir/b.bin", {0x00, 0xff, 0x10}},
        {"empty", {}},
    };
    Bytes archive = package::zip_pack(entries);
    CHECK(package::zip_pack(entries) == archive);

    auto unpacked = package::zip_unpack(archive);
    REQUIRE(unpacked.ok());
    CHECK(unpacked.value == entries);

    SUBCASE("truncated archives are rejected") {
        Bytes cut(archive.begin(), archive.begin() + 10);
        CHECK_FALSE(package::zip_unpack(cut).ok());
    }
}

TEST_CASE("build_manifest sorts, digests, and guards") {
    std::vector<package::FileInput> files = {
        {"z/last.txt", text_bytes("z")},
        {"a/first.txt", text_bytes("a")},
    };
    auto manifest = package::build_manifest("com.example.app", 3, files);
    REQUIRE(manifest.ok());
    CHECK(manifest.value.files[0].path == "a/first.txt");
    CHECK(manifest.value.files[1].path == "z/last.txt");
    CHECK(manifest.value.files[0].digest == crypto::sha256(text_bytes("a")));
    CHECK(manifest.value.files[0].size == 1);

    SUBCASE("duplicate paths are rejected") {
        files.push_back({"a/first.txt", text_bytes("again")});
        CHECK(package::build_manifest("com.example.app", 3, files).code == Err::DuplicatePath);
    }
    SUBCASE("an empty file list is rejected") {
        CHECK(package::build_manifest("com.example.app", 3, {}).code == Err::EmptyPackage);
    }
    SUBCASE("reserved metadata paths are rejected") {
        std::vector<package::FileInput> bad = {{"DCM-META/manifest.bin", text_bytes("x")}};
        CHECK_FALSE(package::build_manifest("com.example.app", 3, bad).ok());
    }
    SUBCASE("a single empty file digests to the empty-input vector") {
        std::vector<package::FileInput> one = {{"empty.txt", {}}};
        auto m = package::build_manifest("com.example.app", 1, one);
        REQUIRE(m.ok());
        CHECK(to_hex(m.value.files[0].digest) ==
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}

TEST_CASE("manifest encoding round trip") {
    auto files = dcmtest::sample_files();
    auto manifest = package::build_manifest("com.example.app", 7, files);
    REQUIRE(manifest.ok());
    auto decoded = package::decode_manifest(package::serialize_manifest(manifest.value));
    REQUIRE(decoded.ok());
    CHECK(decoded.value == manifest.value);
}

TEST_CASE("sign_package guards the key and the leaf role") {
    auto pki = dcmtest::make_pki();
    auto files = dcmtest::sample_files();
    auto manifest = package::build_manifest("com.example.app", 1, files);
    REQUIRE(manifest.ok());

    SUBCASE("an intermediate leaf is refused") {
        trust::CertificateChain bad = {pki.ica.own_certificate, pki.root.own_certificate};
        CHECK(package::sign_package(files, manifest.value, pki.ica.secret_key, bad).code ==
              Err::NotADeveloperCert);
    }
    SUBCASE("a mismatched key is refused") {
        auto stranger = crypto::generate_keypair();
        CHECK(package::sign_package(files, manifest.value, stranger.secret, pki.chain()).code ==
              Err::KeyMismatch);
    }
}

TEST_CASE("sign_package round trip and byte determinism") {
    auto pki = dcmtest::make_pki();
    auto files = dcmtest::sample_files();
    auto manifest = package::build_manifest("com.example.app", 1, files);
    REQUIRE(manifest.ok());

    auto archive = package::sign_package(files, manifest.value, pki.dev_keys.secret, pki.chain());
    REQUIRE(archive.ok());
    auto again = package::sign_package(files, manifest.value, pki.dev_keys.secret, pki.chain());
    REQUIRE(again.ok());
    CHECK(archive.value.zip == again.value.zip);

    auto meta = package::extract_metadata(archive.value);
    REQUIRE(meta.ok());
    CHECK(meta.value.manifest == manifest.value);
    CHECK(meta.value.signature_block.chain == pki.chain());
    CHECK(meta.value.signature_block.manifest_digest ==
          crypto::sha256(package::serialize_manifest(manifest.value)));
    CHECK(crypto::verify(meta.value.signature_block.manifest_digest,
                         meta.value.signature_block.signature, pki.dev_keys.public_key));

    auto content = package::content_files(archive.value);
    REQUIRE(content.ok());
    CHECK(content.value.size() == files.size());
}

TEST_CASE("extract_metadata reports missing and malformed metadata") {
    auto pki = dcmtest::make_pki();
    auto archive = dcmtest::make_archive(pki);

    auto entries = package::zip_unpack(archive.zip);
    REQUIRE(entries.ok());

    SUBCASE("missing signature entry") {
        std::vector<package::ZipEntry> pruned;
        for (const auto& entry : entries.value) {
            if (entry.name != package::kSignatureEntry) {
                pruned.push_back(entry);
            }
        }
        package::PackageArchive broken{package::zip_pack(pruned)};
        CHECK(package::extract_metadata(broken).code == Err::MissingMetadata);
    }

    SUBCASE("truncated manifest entry") {
        std::vector<package::ZipEntry> mangled = entries.value;
        for (auto& entry : mangled) {
            if (entry.name == package::kManifestEntry) {
                entry.data.resize(entry.data.size() / 2);
            }
        }
        package::PackageArchive broken{package::zip_pack(mangled)};
        CHECK(package::extract_metadata(broken).code == Err::MalformedMetadata);
    }

    SUBCASE("not a zip at all") {
        package::PackageArchive garbage{text_bytes("not an archive")};
        CHECK(package::extract_metadata(garbage).code == Err::MalformedMetadata);
    }
}

TEST_CASE("package file io round trip") {
    auto pki = dcmtest::make_pki();
    auto archive = dcmtest::make_archive(pki);
    auto dir = dcmtest::scratch_dir("pkgfile");
    REQUIRE(package::write_package_file(dir / "app.pkg", archive).ok());
    auto loaded = package::read_package_file(dir / "app.pkg");
    REQUIRE(loaded.ok());
    CHECK(loaded.value == archive);
}
