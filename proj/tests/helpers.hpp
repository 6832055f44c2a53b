// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures: a deterministic root -> intermediate -> developer setup
// and package builders the module tests compose.

#pragma once

#include <filesystem>
#include <string>

#include "dcm/authority.hpp"
#include "dcm/ctlog.hpp"
#include "dcm/package.hpp"
#include "dcm/trust.hpp"

namespace dcmtest {

using namespace dcm;

inline Hash32 seed_of(std::string_view label) {
    return crypto::sha256(ByteSpan(reinterpret_cast<const uint8_t*>(label.data()), label.size()));
}

inline Bytes text_bytes(std::string_view text) {
    return Bytes(text.begin(), text.end());
}

inline trust::SubjectIdentity identity(std::string cn, std::string org = "Test Org") {
    trust::SubjectIdentity id;
    id.common_name = std::move(cn);
    id.organization = std::move(org);
    id.country = "PT";
    return id;
}

constexpr Timestamp kT0 = 1'700'000'000;

struct Pki {
    authority::CaState root;
    authority::CaState ica;
    crypto::KeyPair dev_keys;
    trust::Certificate dev_cert;
    ctlog::SignedCertificateTimestamp dev_sct;
    std::shared_ptr<ctlog::Log> log;
    std::unique_ptr<ctlog::InProcessSubmitter> submitter;
    Timestamp now = kT0;

    [[nodiscard]] trust::CertificateChain chain() const {
        return {dev_cert, ica.own_certificate, root.own_certificate};
    }
    [[nodiscard]] std::vector<trust::Certificate> anchors() const {
        return {root.own_certificate};
    }
};

/// Root + one intermediate + one developer certified at `level`-grade evidence.
inline Pki make_pki(trust::TrustLevel level = trust::TrustLevel::Trusted,
                    int64_t dev_lifetime_days = 365) {
    Pki pki;
    pki.log = std::make_shared<ctlog::Log>(
        ctlog::Log::create(crypto::keypair_from_seed(seed_of("test/log"))));
    pki.submitter = std::make_unique<ctlog::InProcessSubmitter>(*pki.log, [] { return kT0; });

    auto root = authority::init_root(identity("Test Root"), 3650, kT0, seed_of("test/root"));
    REQUIRE(root.ok());
    pki.root = std::move(root.value);

    auto ica = authority::issue_intermediate(pki.root, identity("Test Store CA"), 1825, kT0,
                                             seed_of("test/ica"));
    REQUIRE(ica.ok());
    pki.ica = std::move(ica.value.second);

    pki.dev_keys = crypto::keypair_from_seed(seed_of("test/dev"));
    authority::PolicyEvidence evidence;
    switch (level) {
        case trust::TrustLevel::Trusted:
            evidence = {true, 800, 15'000, {}};
            break;
        case trust::TrustLevel::Unknown:
            evidence = {false, 10, 100, {}};
            break;
        case trust::TrustLevel::Warning:
            evidence = {true, 800, 15'000, {{trust::Severity::Warning, "evt-w"}}};
            break;
        case trust::TrustLevel::Critical:
            evidence = {true, 800, 15'000, {{trust::Severity::Critical, "evt-c"}}};
            break;
    }
    auto issued = authority::issue_developer(pki.ica, identity("Test Dev"), pki.dev_keys.public_key,
                                             evidence, dev_lifetime_days, *pki.submitter, kT0);
    REQUIRE(issued.ok());
    pki.dev_cert = issued.value.certificate;
    pki.dev_sct = issued.value.sct;
    return pki;
}

inline std::vector<package::FileInput> sample_files() {
    return {
        {"bin/app", text_bytes("the application binary")},
        {"assets/readme.txt", text_bytes("hello")},
    };
}

inline package::PackageArchive make_archive(const Pki& pki,
                                            const std::string& name = "com.example.app",
                                            uint64_t version = 1) {
    auto files = sample_files();
    auto manifest = package::build_manifest(name, version, files);
    REQUIRE(manifest.ok());
    auto archive = package::sign_package(files, manifest.value, pki.dev_keys.secret, pki.chain());
    REQUIRE(archive.ok());
    return archive.value;
}

/// Unique scratch directory under the build tree's temp space.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    static std::atomic<uint64_t> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("dcm-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace dcmtest
