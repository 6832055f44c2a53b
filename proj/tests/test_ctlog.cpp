// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "dcm/ctlog.hpp"
#include "helpers.hpp"

using namespace dcm;
using dcmtest::kT0;

namespace {

// Independent tree oracle: iterative level-by-level reduction, pairing
// adjacent nodes left to right and promoting a trailing odd node. The
// production code computes the same tree by recursive splitting; agreement of
// the two routes is the point of these tests.
Hash32 brute_node(const Hash32& left, const Hash32& right) {
    Bytes buf;
    buf.push_back(0x01);
    buf.insert(buf.end(), left.begin(), left.end());
    buf.insert(buf.end(), right.begin(), right.end());
    return crypto::sha256(buf);
}

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

trust::Certificate nth_cert(const dcmtest::Pki& pki, size_t n) {
    trust::CertificateBody body = pki.dev_cert.body;
    body.serial = Serial::from_u64(100 + n);
    auto cert = trust::sign_certificate(body, pki.ica.secret_key);
    REQUIRE(cert.ok());
    return cert.value;
}

ctlog::Log log_of_size(const dcmtest::Pki& pki, size_t n) {
    auto log = ctlog::Log::create(crypto::keypair_from_seed(dcmtest::seed_of("ctlog/suite")));
    for (size_t i = 0; i < n; ++i) {
        REQUIRE(log.append(nth_cert(pki, i), kT0 + static_cast<Timestamp>(i)).ok());
    }
    return log;
}

}  // namespace

TEST_CASE("append assigns consecutive indices and signs SCTs") {
    auto pki = dcmtest::make_pki();
    auto log = ctlog::Log::create(crypto::keypair_from_seed(dcmtest::seed_of("ctlog/append")));
    CHECK(log.size() == 0);

    auto first = log.append(nth_cert(pki, 0), kT0);
    REQUIRE(first.ok());
    CHECK(first.value.index == 0);
    auto second = log.append(nth_cert(pki, 1), kT0 + 1);
    REQUIRE(second.ok());
    CHECK(second.value.index == 1);
    CHECK(log.size() == 2);

    CHECK(ctlog::verify_sct(first.value, nth_cert(pki, 0), log.public_key()).ok());
    CHECK(ctlog::verify_sct(second.value, nth_cert(pki, 1), log.public_key()).ok());
    // An SCT does not transfer to a different certificate.
    CHECK_FALSE(ctlog::verify_sct(first.value, nth_cert(pki, 1), log.public_key()).ok());
}

TEST_CASE("root_hash: empty tree, single leaf, and the unbalanced three-leaf tree") {
    auto pki = dcmtest::make_pki();
    auto log = log_of_size(pki, 3);

    // Size 0: the digest of empty input.
    CHECK(to_hex(log.root_hash(0).value) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(log.root_hash(0).value == ctlog::empty_root());

    // Size 1: the root is the leaf hash itself, H(0x00 || leaf bytes).
    Hash32 leaf0 = ctlog::leaf_hash_of(nth_cert(pki, 0));
    CHECK(log.root_hash(1).value == leaf0);
    CHECK(log.entries()[0].leaf_hash == leaf0);
    {
        Bytes prefixed;
        prefixed.push_back(0x00);
        Bytes cert_bytes = trust::serialize_certificate(nth_cert(pki, 0));
        prefixed.insert(prefixed.end(), cert_bytes.begin(), cert_bytes.end());
        CHECK(leaf0 == crypto::sha256(prefixed));
    }

    // Size 3: H(0x01 || H(0x01 || l0 || l1) || l2), spelled out by hand.
    Hash32 l1 = ctlog::leaf_hash_of(nth_cert(pki, 1));
    Hash32 l2 = ctlog::leaf_hash_of(nth_cert(pki, 2));
    CHECK(log.root_hash(3).value == brute_node(brute_node(leaf0, l1), l2));

    CHECK(log.root_hash(4).code == Err::SizeOutOfRange);
}

TEST_CASE("recursive roots agree with the iterative oracle up to 16 leaves") {
    auto pki = dcmtest::make_pki();
    auto log = log_of_size(pki, 16);
    std::vector<Hash32> leaves;
    for (const auto& entry : log.entries()) {
        leaves.push_back(entry.leaf_hash);
    }
    for (size_t size = 0; size <= 16; ++size) {
        auto root = log.root_hash(size);
        REQUIRE(root.ok());
        CHECK(root.value ==
              brute_root(std::vector<Hash32>(leaves.begin(), leaves.begin() + size)));
    }
}

TEST_CASE("inclusion proofs verify for every index/size pair up to 16 leaves") {
    auto pki = dcmtest::make_pki();
    auto log = log_of_size(pki, 16);
    for (uint64_t size = 1; size <= 16; ++size) {
        Hash32 root = log.root_hash(size).value;
        for (uint64_t index = 0; index < size; ++index) {
            auto proof = log.inclusion_proof(index, size);
            REQUIRE(proof.ok());
            CHECK(ctlog::verify_inclusion(proof.value, log.entries()[index].leaf_hash, root));
        }
    }

    SUBCASE("single-node tree has an empty path and root == leaf") {
        auto proof = log.inclusion_proof(0, 1);
        REQUIRE(proof.ok());
        CHECK(proof.value.path.empty());
        CHECK(ctlog::verify_inclusion(proof.value, log.entries()[0].leaf_hash,
                                      log.root_hash(1).value));
    }

    SUBCASE("tampered leaf hash fails") {
        auto proof = log.inclusion_proof(3, 11);
        REQUIRE(proof.ok());
        Hash32 raw = log.entries()[3].leaf_hash;
        raw[0] ^= 0x01;
        CHECK_FALSE(ctlog::verify_inclusion(proof.value, raw, log.root_hash(11).value));
    }

    SUBCASE("out-of-range requests are refused") {
        CHECK(log.inclusion_proof(5, 5).code == Err::IndexOutOfRange);
        CHECK(log.inclusion_proof(0, 17).code == Err::SizeOutOfRange);
    }
}

TEST_CASE("consistency proofs verify for every size pair up to 16 leaves") {
    auto pki = dcmtest::make_pki();
    auto log = log_of_size(pki, 16);
    for (uint64_t old_size = 1; old_size <= 16; ++old_size) {
        Hash32 old_root = log.root_hash(old_size).value;
        for (uint64_t new_size = old_size; new_size <= 16; ++new_size) {
            auto proof = log.consistency_proof(old_size, new_size);
            REQUIRE(proof.ok());
            CHECK(ctlog::verify_consistency(proof.value, old_root, log.root_hash(new_size).value));
        }
    }

    SUBCASE("equal sizes take the empty proof") {
        auto proof = log.consistency_proof(7, 7);
        REQUIRE(proof.ok());
        CHECK(proof.value.path.empty());
        CHECK(ctlog::verify_consistency(proof.value, log.root_hash(7).value,
                                        log.root_hash(7).value));
    }

    SUBCASE("a forked log is rejected") {
        // Same first five entries, entry 2 replaced, then extended.
        auto fork = ctlog::Log::create(crypto::keypair_from_seed(dcmtest::seed_of("ctlog/fork")));
        for (size_t i = 0; i < 8; ++i) {
            REQUIRE(fork.append(nth_cert(pki, i == 2 ? 77 : i), kT0).ok());
        }
        auto proof = fork.consistency_proof(5, 8);
        REQUIRE(proof.ok());
        // Proof from the forked tree cannot connect the honest old root.
        CHECK_FALSE(
            ctlog::verify_consistency(proof.value, log.root_hash(5).value, fork.root_hash(8).value));
    }

    SUBCASE("zero old size is out of range") {
        CHECK(log.consistency_proof(0, 4).code == Err::SizeOutOfRange);
    }
}

TEST_CASE("every single-bit corruption of a proof is rejected (8-leaf sweep)") {
    auto pki = dcmtest::make_pki();
    auto log = log_of_size(pki, 8);
    for (uint64_t size = 1; size <= 8; ++size) {
        Hash32 root = log.root_hash(size).value;
        for (uint64_t index = 0; index < size; ++index) {
            auto proof = log.inclusion_proof(index, size);
            REQUIRE(proof.ok());
            for (size_t h = 0; h < proof.value.path.size(); ++h) {
                for (int bit = 0; bit < 8; ++bit) {
                    auto mutated = proof.value;
                    mutated.path[h][0] ^= static_cast<uint8_t>(1 << bit);
                    CHECK_FALSE(ctlog::verify_inclusion(mutated, log.entries()[index].leaf_hash,
                                                        root));
                }
            }
        }
    }
}

TEST_CASE("log persistence replays and checks the checkpoint") {
    auto pki = dcmtest::make_pki();
    auto dir = dcmtest::scratch_dir("ctlog-persist");

    Hash32 live_root{};
    {
        auto log = ctlog::Log::open(dir, crypto::keypair_from_seed(dcmtest::seed_of("ctlog/disk")));
        REQUIRE(log.ok());
        for (size_t i = 0; i < 5; ++i) {
            REQUIRE(log.value.append(nth_cert(pki, i), kT0 + static_cast<Timestamp>(i)).ok());
        }
        live_root = log.value.current_root();
    }

    auto reopened = ctlog::Log::open(dir);
    REQUIRE(reopened.ok());
    CHECK(reopened.value.size() == 5);
    CHECK(reopened.value.current_root() == live_root);
    CHECK(reopened.value.log_id() ==
          trust::fingerprint(crypto::keypair_from_seed(dcmtest::seed_of("ctlog/disk")).public_key));

    SUBCASE("a truncated journal no longer extends the checkpoint") {
        auto journal_path = dir / "log.journal";
        auto records = Journal::read_all(journal_path);
        REQUIRE(records.ok());
        // Drop the last record without refreshing the checkpoint.
        std::ofstream out(journal_path, std::ios::trunc);
        for (size_t i = 0; i + 1 < records.value.size(); ++i) {
            out << to_hex(records.value[i]) << '\n';
        }
        out.close();
        CHECK_FALSE(ctlog::Log::open(dir).ok());
    }

    SUBCASE("a rewritten history is rejected even at the same size") {
        auto journal_path = dir / "log.journal";
        auto records = Journal::read_all(journal_path);
        REQUIRE(records.ok());
        std::ofstream out(journal_path, std::ios::trunc);
        // Replace entry 2 with a re-signed certificate at the same index.
        for (size_t i = 0; i < records.value.size(); ++i) {
            if (i == 2) {
                auto entry = ctlog::decode_log_entry(records.value[i]);
                REQUIRE(entry.ok());
                entry.value.certificate = nth_cert(pki, 99);
                entry.value.leaf_hash = ctlog::leaf_hash_of(entry.value.certificate);
                out << to_hex(ctlog::serialize_log_entry(entry.value)) << '\n';
            } else {
                out << to_hex(records.value[i]) << '\n';
            }
        }
        out.close();
        CHECK_FALSE(ctlog::Log::open(dir).ok());
    }

    SUBCASE("a checkpoint lagging by a crash window is accepted") {
        // Rewind the checkpoint to size 3; the journal (size 5) extends it.
        {
            auto partial = ctlog::Log::open(dir);
            REQUIRE(partial.ok());
            std::ofstream out(dir / "checkpoint", std::ios::trunc);
            out << 3 << ' ' << to_hex(partial.value.root_hash(3).value) << '\n';
        }
        auto recovered = ctlog::Log::open(dir);
        REQUIRE(recovered.ok());
        CHECK(recovered.value.size() == 5);
    }
}

TEST_CASE("monitor_scan raises the three alert kinds") {
    auto pki = dcmtest::make_pki(trust::TrustLevel::Trusted);

    ctlog::MonitorContext ctx;
    ctlog::add_registry_to_context(ctx, pki.root);
    ctlog::add_registry_to_context(ctx, pki.ica);

    SUBCASE("a clean log yields no alerts") {
        CHECK(ctlog::monitor_scan(*pki.log, ctx).empty());
    }

    SUBCASE("Trusted without qualifying evidence is flagged") {
        auto attacker = crypto::keypair_from_seed(dcmtest::seed_of("monitor/attacker"));
        auto issued = authority::issue_developer_at(
            pki.ica, dcmtest::identity("Shady"), attacker.public_key, {false, 3, 7, {}},
            trust::TrustLevel::Trusted, std::nullopt, 365, *pki.submitter, kT0);
        REQUIRE(issued.ok());
        ctlog::MonitorContext fresh;
        ctlog::add_registry_to_context(fresh, pki.root);
        ctlog::add_registry_to_context(fresh, pki.ica);
        auto alerts = ctlog::monitor_scan(*pki.log, fresh);
        REQUIRE(alerts.size() == 1);
        CHECK(alerts[0].kind == ctlog::AlertKind::TrustedWithoutEvidence);
        CHECK(alerts[0].entry_index == 1);
    }

    SUBCASE("a certificate from an unregistered issuer is flagged") {
        auto rogue = authority::init_root(dcmtest::identity("Rogue Root"), 3650, kT0);
        REQUIRE(rogue.ok());
        auto rogue_ica =
            authority::issue_intermediate(rogue.value, dcmtest::identity("Rogue CA"), 1825, kT0);
        REQUIRE(rogue_ica.ok());
        auto dev = crypto::generate_keypair();
        auto issued = authority::issue_developer(rogue_ica.value.second, dcmtest::identity("Dev"),
                                                 dev.public_key, {false, 1, 1, {}}, 365,
                                                 *pki.submitter, kT0);
        REQUIRE(issued.ok());
        auto alerts = ctlog::monitor_scan(*pki.log, ctx);
        REQUIRE(alerts.size() == 1);
        CHECK(alerts[0].kind == ctlog::AlertKind::UnknownIssuer);
    }

    SUBCASE("two unrevoked certificates for one developer are flagged") {
        // Issue a second certificate for the same developer key without
        // revoking the first (bypassing reevaluate's revoke step).
        auto issued = authority::issue_developer(pki.ica, dcmtest::identity("Test Dev"),
                                                 pki.dev_keys.public_key, {true, 800, 15'000, {}},
                                                 365, *pki.submitter, kT0);
        REQUIRE(issued.ok());
        ctlog::MonitorContext fresh;
        ctlog::add_registry_to_context(fresh, pki.root);
        ctlog::add_registry_to_context(fresh, pki.ica);
        auto alerts = ctlog::monitor_scan(*pki.log, fresh);
        REQUIRE(alerts.size() == 1);
        CHECK(alerts[0].kind == ctlog::AlertKind::DuplicateActiveCert);

        // Revoking the older certificate clears the alert.
        REQUIRE(authority::revoke(pki.ica, pki.dev_cert.body.serial,
                                  authority::RevocationReason::TrustLevelChange, kT0 + 5)
                    .ok());
        ctlog::MonitorContext after;
        ctlog::add_registry_to_context(after, pki.root);
        ctlog::add_registry_to_context(after, pki.ica);
        CHECK(ctlog::monitor_scan(*pki.log, after).empty());
    }
}

TEST_CASE("sct encoding round trip") {
    auto pki = dcmtest::make_pki();
    auto decoded = ctlog::decode_sct(ctlog::serialize_sct(pki.dev_sct));
    REQUIRE(decoded.ok());
    CHECK(decoded.value == pki.dev_sct);
}
