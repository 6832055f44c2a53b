// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: eight end-to-end criteria, each with an exact expectation
// and a wall-clock budget. Prints one line per criterion and exits non-zero
// if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dcm/authority.hpp"
#include "dcm/ctlog.hpp"
#include "dcm/package.hpp"
#include "dcm/revocation.hpp"
#include "dcm/sim.hpp"
#include "dcm/trust.hpp"
#include "dcm/verifier.hpp"

using namespace dcm;

namespace {

constexpr Timestamp kT0 = 1'700'000'000;

Hash32 seed_of(std::string_view label) {
    return crypto::sha256(ByteSpan(reinterpret_cast<const uint8_t*>(label.data()), label.size()));
}

Bytes text_bytes(std::string_view text) {
    return Bytes(text.begin(), text.end());
}

trust::SubjectIdentity identity(std::string cn) {
    trust::SubjectIdentity id;
    id.common_name = std::move(cn);
    id.organization = "Acceptance";
    id.country = "PT";
    return id;
}

struct Fixture {
    authority::CaState root;
    authority::CaState ica;
    crypto::KeyPair dev;
    trust::Certificate dev_cert;
    std::shared_ptr<ctlog::Log> log;
    std::unique_ptr<ctlog::InProcessSubmitter> submitter;

    trust::CertificateChain chain() const {
        return {dev_cert, ica.own_certificate, root.own_certificate};
    }
};

bool build_fixture(Fixture& f, const authority::PolicyEvidence& evidence, std::string& err) {
    f.log = std::make_shared<ctlog::Log>(
        ctlog::Log::create(crypto::keypair_from_seed(seed_of("acc/log"))));
    f.submitter = std::make_unique<ctlog::InProcessSubmitter>(*f.log, [] { return kT0; });
    auto root = authority::init_root(identity("Acceptance Root"), 3650, kT0, seed_of("acc/root"));
    if (!root) {
        err = root.message;
        return false;
    }
    f.root = std::move(root.value);
    auto ica = authority::issue_intermediate(f.root, identity("Acceptance Store CA"), 1825, kT0,
                                             seed_of("acc/ica"));
    if (!ica) {
        err = ica.message;
        return false;
    }
    f.ica = std::move(ica.value.second);
    f.dev = crypto::keypair_from_seed(seed_of("acc/dev"));
    auto issued = authority::issue_developer(f.ica, identity("Acceptance Dev"), f.dev.public_key,
                                             evidence, 365, *f.submitter, kT0);
    if (!issued) {
        err = issued.message;
        return false;
    }
    f.dev_cert = issued.value.certificate;
    return true;
}

std::vector<package::FileInput> sample_files() {
    return {{"bin/app", text_bytes("application body")},
            {"assets/data.txt", text_bytes("static data")}};
}

Result<package::PackageArchive> build_archive(const Fixture& f,
                                              const trust::CertificateChain& chain) {
    auto files = sample_files();
    auto manifest = package::build_manifest("com.acceptance.app", 1, files);
    if (!manifest) {
        return forward_failure<package::PackageArchive>(manifest);
    }
    return package::sign_package(files, manifest.value, f.dev.secret, chain);
}

verifier::VerifierConfig make_config(const Fixture& f, crypto::KeyPair responder,
                                     Timestamp at = kT0 + 100) {
    verifier::VerifierConfig config;
    config.trust_anchors = {f.root.own_certificate};
    auto registries = [root = f.root, ica = f.ica] {
        return std::vector<revocation::RegistryView>{revocation::registry_view(root),
                                                     revocation::registry_view(ica)};
    };
    revocation::Client client;
    client.source = std::make_shared<revocation::RegistrySource>(registries, responder.secret,
                                                                 [at] { return at; });
    client.responder_key = responder.public_key;
    config.revocation = client;
    config.clock = [at] { return at; };
    return config;
}

// ---- criterion 1: six-step fault attribution ----

bool criterion_attribution(std::string& err) {
    authority::PolicyEvidence trusted_evidence{true, 800, 15'000, {}};
    auto responder = crypto::keypair_from_seed(seed_of("acc/responder"));

    auto expect = [&](const verifier::VerificationReport& report, int step) {
        if (step == 0) {
            if (!report.overall_ok) {
                err += "honest fixture failed at step " + std::to_string(report.first_failed_step) +
                       "; ";
                return false;
            }
            return true;
        }
        if (report.overall_ok || report.first_failed_step != step) {
            err += "expected failure at step " + std::to_string(step) + ", got " +
                   (report.overall_ok ? std::string("pass") : std::to_string(report.first_failed_step)) +
                   "; ";
            return false;
        }
        for (int i = 1; i < step; ++i) {
            if (!report.step(i).passed()) {
                err += "step " + std::to_string(i) + " should pass before the fault at " +
                       std::to_string(step) + "; ";
                return false;
            }
        }
        return true;
    };

    bool ok = true;

    {  // honest
        Fixture f;
        if (!build_fixture(f, trusted_evidence, err)) return false;
        auto archive = build_archive(f, f.chain());
        if (!archive) { err += archive.message; return false; }
        ok &= expect(verifier::verify_package(archive.value, make_config(f, responder)), 0);
    }
    {  // 1: tampered content
        Fixture f;
        if (!build_fixture(f, trusted_evidence, err)) return false;
        auto archive = build_archive(f, f.chain());
        auto entries = package::zip_unpack(archive.value.zip);
        for (auto& entry : entries.value) {
            if (entry.name == "bin/app") entry.data[0] ^= 0x01;
        }
        package::PackageArchive tampered{package::zip_pack(entries.value)};
        ok &= expect(verifier::verify_package(tampered, make_config(f, responder)), 1);
    }
    {  // 2: unknown root
        Fixture f;
        if (!build_fixture(f, trusted_evidence, err)) return false;
        auto archive = build_archive(f, f.chain());
        auto config = make_config(f, responder);
        auto stranger = authority::init_root(identity("Stranger"), 3650, kT0, seed_of("acc/stranger"));
        config.trust_anchors = {stranger.value.own_certificate};
        ok &= expect(verifier::verify_package(archive.value, config), 2);
    }
    {  // 3: expired developer certificate
        Fixture f;
        if (!build_fixture(f, trusted_evidence, err)) return false;
        auto archive = build_archive(f, f.chain());
        Timestamp late = f.dev_cert.body.not_after + 10;
        ok &= expect(verifier::verify_package(archive.value, make_config(f, responder, late)), 3);
    }
    {  // 4: revoked certificate
        Fixture f;
        if (!build_fixture(f, trusted_evidence, err)) return false;
        auto archive = build_archive(f, f.chain());
        if (auto r = authority::revoke(f.ica, f.dev_cert.body.serial,
                                       authority::RevocationReason::KeyCompromise, kT0 + 5);
            !r) {
            err += r.message;
            return false;
        }
        ok &= expect(verifier::verify_package(archive.value, make_config(f, responder)), 4);
    }
    {  // 5: tampered chain signature
        Fixture f;
        if (!build_fixture(f, trusted_evidence, err)) return false;
        auto chain = f.chain();
        chain[1].signature.bytes[11] ^= 0x04;
        auto archive = build_archive(f, chain);
        ok &= expect(verifier::verify_package(archive.value, make_config(f, responder)), 5);
    }
    {  // 6: missing trust-level extension
        Fixture f;
        if (!build_fixture(f, trusted_evidence, err)) return false;
        trust::CertificateBody body = f.dev_cert.body;
        body.extensions.clear();
        trust::Certificate bare;
        bare.body = body;
        bare.signature = crypto::sign(trust::serialize_body(body), f.ica.secret_key);
        trust::CertificateChain chain = {bare, f.ica.own_certificate, f.root.own_certificate};
        auto archive = build_archive(f, chain);
        ok &= expect(verifier::verify_package(archive.value, make_config(f, responder)), 6);
    }
    return ok;
}

// ---- criterion 2: policy threshold sweep ----

bool criterion_policy_sweep(std::string& err) {
    bool ok = true;
    for (int64_t days : {729, 730, 731}) {
        for (int64_t installs : {9'999, 10'000, 10'001}) {
            for (bool verified : {false, true}) {
                auto level = authority::evaluate_policy({verified, days, installs, {}});
                bool expect_trusted = verified && days >= 731 && installs >= 10'001;
                bool got_trusted = level == trust::TrustLevel::Trusted;
                if (got_trusted != expect_trusted ||
                    (!got_trusted && level != trust::TrustLevel::Unknown)) {
                    err += "(" + std::to_string(days) + "d," + std::to_string(installs) + "," +
                           (verified ? "v" : "u") + ") -> " + trust::to_string(level) + "; ";
                    ok = false;
                }
            }
        }
    }
    return ok;
}

// ---- criterion 3: revoke-and-reissue ----

bool criterion_revoke_reissue(std::string& err) {
    Fixture f;
    if (!build_fixture(f, {false, 10, 100, {}}, err)) {  // starts Unknown
        return false;
    }
    Serial old_serial = f.dev_cert.body.serial;
    auto outcome = authority::reevaluate(f.ica, trust::fingerprint(f.dev.public_key),
                                         {true, 900, 20'000, {}}, *f.submitter, kT0 + 50);
    if (!outcome || !outcome.value.reissued || !outcome.value.new_certificate) {
        err += "reevaluation did not reissue";
        return false;
    }
    if (outcome.value.new_certificate->trust_level() != trust::TrustLevel::Trusted) {
        err += "new certificate does not carry the new level";
        return false;
    }
    auto responder = crypto::keypair_from_seed(seed_of("acc/responder"));
    auto view = revocation::registry_view(f.ica);
    auto old_status = revocation::serve_status({view.issuer, old_serial}, view, responder.secret,
                                               kT0 + 60);
    if (old_status.status != revocation::CertStatus::Revoked) {
        err += "old serial does not answer revoked";
        return false;
    }
    auto new_status = revocation::serve_status(
        {view.issuer, outcome.value.new_certificate->body.serial}, view, responder.secret, kT0 + 60);
    if (new_status.status != revocation::CertStatus::Good) {
        err += "new serial does not answer good";
        return false;
    }
    return true;
}

// ---- criterion 4: Merkle proofs vs brute force, with bit-flip rejection ----

Hash32 brute_node(const Hash32& left, const Hash32& right) {
    Bytes buf;
    buf.push_back(0x01);
    buf.insert(buf.end(), left.begin(), left.end());
    buf.insert(buf.end(), right.begin(), right.end());
    return crypto::sha256(buf);
}

// Independent oracle: iterative pairing with odd-node promotion.
Hash32 brute_root(std::vector<Hash32> level) {
    if (level.empty()) {
        return crypto::sha256({});
    }
    while (level.size() > 1) {
        std::vector<Hash32> next;
        size_t i = 0;
        for (; i + 1 < level.size(); i += 2) {
            next.push_back(brute_node(level[i], level[i + 1]));
        }
        if (i < level.size()) {
            next.push_back(level[i]);
        }
        level = std::move(next);
    }
    return level[0];
}

bool criterion_merkle(std::string& err) {
    Fixture f;
    if (!build_fixture(f, {true, 800, 15'000, {}}, err)) {
        return false;
    }
    auto log = ctlog::Log::create(crypto::keypair_from_seed(seed_of("acc/merkle")));
    std::vector<Hash32> leaves;
    for (uint64_t i = 0; i < 16; ++i) {
        trust::CertificateBody body = f.dev_cert.body;
        body.serial = Serial::from_u64(1000 + i);
        auto cert = trust::sign_certificate(body, f.ica.secret_key);
        auto sct = log.append(cert.value, kT0 + static_cast<Timestamp>(i));
        if (!cert || !sct) {
            err += "log build failed";
            return false;
        }
        leaves.push_back(log.entries().back().leaf_hash);
    }

    for (uint64_t size = 0; size <= 16; ++size) {
        auto produced = log.root_hash(size);
        Hash32 oracle = brute_root(std::vector<Hash32>(leaves.begin(),
                                                       leaves.begin() + static_cast<long>(size)));
        if (!produced || produced.value != oracle) {
            err += "root mismatch at size " + std::to_string(size) + "; ";
            return false;
        }
    }

    for (uint64_t size = 1; size <= 16; ++size) {
        Hash32 root = brute_root(std::vector<Hash32>(leaves.begin(),
                                                     leaves.begin() + static_cast<long>(size)));
        for (uint64_t index = 0; index < size; ++index) {
            auto proof = log.inclusion_proof(index, size);
            if (!proof || !ctlog::verify_inclusion(proof.value, leaves[index], root)) {
                err += "inclusion failed at (" + std::to_string(index) + "," +
                       std::to_string(size) + "); ";
                return false;
            }
            // every single-bit corruption of the proof path or the leaf
            for (size_t h = 0; h < proof.value.path.size(); ++h) {
                for (size_t byte = 0; byte < 32; ++byte) {
                    for (int bit = 0; bit < 8; ++bit) {
                        auto mutated = proof.value;
                        mutated.path[h][byte] ^= static_cast<uint8_t>(1 << bit);
                        if (ctlog::verify_inclusion(mutated, leaves[index], root)) {
                            err += "corrupted inclusion proof accepted; ";
                            return false;
                        }
                    }
                }
            }
            for (size_t byte = 0; byte < 32; ++byte) {
                for (int bit = 0; bit < 8; ++bit) {
                    Hash32 bad_leaf = leaves[index];
                    bad_leaf[byte] ^= static_cast<uint8_t>(1 << bit);
                    if (ctlog::verify_inclusion(proof.value, bad_leaf, root)) {
                        err += "corrupted leaf accepted; ";
                        return false;
                    }
                }
            }
        }
    }

    for (uint64_t old_size = 1; old_size <= 16; ++old_size) {
        Hash32 old_root = brute_root(std::vector<Hash32>(
            leaves.begin(), leaves.begin() + static_cast<long>(old_size)));
        for (uint64_t new_size = old_size; new_size <= 16; ++new_size) {
            Hash32 new_root = brute_root(std::vector<Hash32>(
                leaves.begin(), leaves.begin() + static_cast<long>(new_size)));
            auto proof = log.consistency_proof(old_size, new_size);
            if (!proof || !ctlog::verify_consistency(proof.value, old_root, new_root)) {
                err += "consistency failed at (" + std::to_string(old_size) + "," +
                       std::to_string(new_size) + "); ";
                return false;
            }
            for (size_t h = 0; h < proof.value.path.size(); ++h) {
                for (size_t byte = 0; byte < 32; ++byte) {
                    for (int bit = 0; bit < 8; ++bit) {
                        auto mutated = proof.value;
                        mutated.path[h][byte] ^= static_cast<uint8_t>(1 << bit);
                        if (ctlog::verify_consistency(mutated, old_root, new_root)) {
                            err += "corrupted consistency proof accepted; ";
                            return false;
                        }
                    }
                }
            }
        }
    }
    return true;
}

// ---- criteria 5 and 6: attack scenarios ----

bool criterion_weakest_link(std::string& err) {
    auto result = sim::run_weakest_link(sim::weakest_link_config());
    if (!result) {
        err += result.message;
        return false;
    }
    for (const char* name : {"alert_raised", "ica_revoked", "install_denied"}) {
        if (!result.value.assertions.contains(name) || !result.value.assertions.at(name)) {
            err += std::string(name) + " failed; ";
            return false;
        }
    }
    return true;
}

bool criterion_dormant(std::string& err) {
    auto result = sim::run_dormant_developer(sim::dormant_developer_config());
    if (!result) {
        err += result.message;
        return false;
    }
    for (const char* name : {"shared", "delisted", "revoked", "sideload_denied"}) {
        if (!result.value.assertions.contains(name) || !result.value.assertions.at(name)) {
            err += std::string(name) + " failed; ";
            return false;
        }
    }
    return true;
}

// ---- criterion 7: byte determinism ----

bool criterion_determinism(std::string& err) {
    auto run_once = [&](Bytes& encoding, Bytes& archive_bytes) -> bool {
        Fixture f;
        std::string inner;
        if (!build_fixture(f, {true, 800, 15'000, {}}, inner)) {
            err += inner;
            return false;
        }
        auto encoded = trust::canonical_encode(f.dev_cert.body);
        if (!encoded) {
            err += encoded.message;
            return false;
        }
        encoding = encoded.value;
        auto archive = build_archive(f, f.chain());
        if (!archive) {
            err += archive.message;
            return false;
        }
        archive_bytes = archive.value.zip;
        return true;
    };
    Bytes enc_a;
    Bytes pkg_a;
    Bytes enc_b;
    Bytes pkg_b;
    if (!run_once(enc_a, pkg_a) || !run_once(enc_b, pkg_b)) {
        return false;
    }
    if (enc_a != enc_b) {
        err += "canonical encodings differ between runs; ";
        return false;
    }
    if (pkg_a != pkg_b) {
        err += "signed packages differ between runs; ";
        return false;
    }
    return true;
}

// ---- criterion 8: OCSP and CRL agree over a random history ----

bool criterion_ocsp_crl_agreement(std::string& err) {
    Fixture f;
    if (!build_fixture(f, {false, 10, 100, {}}, err)) {
        return false;
    }
    std::mt19937_64 rng(2024);
    std::vector<Serial> issued{f.dev_cert.body.serial};
    Timestamp t = kT0;
    int ops = 0;
    while (ops < 140) {
        t += 7;
        ++ops;
        if (rng() % 3 != 0) {
            auto keys = crypto::keypair_from_seed(seed_of("acc/agree/" + std::to_string(ops)));
            auto result =
                authority::issue_developer(f.ica, identity("dev-" + std::to_string(ops)),
                                           keys.public_key, {false, 1, 1, {}}, 3650, *f.submitter, t);
            if (!result) {
                err += result.message;
                return false;
            }
            issued.push_back(result.value.certificate.body.serial);
        } else {
            Serial pick = issued[rng() % issued.size()];
            auto result =
                authority::revoke(f.ica, pick, authority::RevocationReason::PolicyViolation, t);
            if (!result.ok() && result.code != Err::AlreadyRevoked) {
                err += result.message;
                return false;
            }
        }
    }

    auto responder = crypto::keypair_from_seed(seed_of("acc/responder"));
    auto view = revocation::registry_view(f.ica);
    auto crl = revocation::build_crl(view, t + 1, f.ica.secret_key);
    if (!revocation::verify_crl(crl, f.ica.own_certificate.body.subject_public_key).ok()) {
        err += "CRL signature failed; ";
        return false;
    }

    std::vector<Serial> probes = issued;
    for (uint64_t extra = 1; extra <= 10; ++extra) {
        probes.push_back(Serial::from_u64(1'000'000 + extra));  // never issued
    }
    for (const Serial& serial : probes) {
        auto response = revocation::serve_status({view.issuer, serial}, view, responder.secret, t);
        bool in_crl = revocation::crl_contains(crl, serial);
        if (in_crl != (response.status == revocation::CertStatus::Revoked)) {
            err += "disagreement on serial " + serial.hex() + "; ";
            return false;
        }
        if (!view.issued.contains(serial) && response.status != revocation::CertStatus::Unknown) {
            err += "never-issued serial not unknown; ";
            return false;
        }
    }
    return true;
}

struct Criterion {
    int number;
    const char* name;
    double budget_seconds;
    std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "six-step fault attribution", 5.0, criterion_attribution},
        {2, "policy threshold sweep", 1.0, criterion_policy_sweep},
        {3, "revoke-and-reissue on trust change", 5.0, criterion_revoke_reissue},
        {4, "merkle proofs vs brute force (<=16 leaves)", 30.0, criterion_merkle},
        {5, "weakest-link scenario", 10.0, criterion_weakest_link},
        {6, "dormant-developer scenario", 10.0, criterion_dormant},
        {7, "byte determinism of encodings and packages", 5.0, criterion_determinism},
        {8, "OCSP/CRL agreement over a random history", 10.0, criterion_ocsp_crl_agreement},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        std::string err;
        auto start = std::chrono::steady_clock::now();
        bool ok = criterion.run(err);
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > criterion.budget_seconds) {
            ok = false;
            err += "exceeded " + std::to_string(criterion.budget_seconds) + "s budget; ";
        }
        std::printf("[%d] %-46s %s (%.2fs)\n", criterion.number, criterion.name,
                    ok ? "PASS" : "FAIL", elapsed);
        if (!ok) {
            std::printf("    %s\n", err.c_str());
            ++failures;
        }
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
