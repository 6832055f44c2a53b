// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/ctlog.hpp"

#include <fstream>

#include "dcm/encoding.hpp"

namespace dcm::ctlog {

namespace {

constexpr uint8_t kLeafPrefix = 0x00;
constexpr uint8_t kNodePrefix = 0x01;

Hash32 node_hash(const Hash32& left, const Hash32& right) {
    Bytes buf;
    buf.reserve(65);
    buf.push_back(kNodePrefix);
    buf.insert(buf.end(), left.begin(), left.end());
    buf.insert(buf.end(), right.begin(), right.end());
    return crypto::sha256(buf);
}

/// Largest power of two strictly less than n (n >= 2).
uint64_t split_point(uint64_t n) {
    uint64_t k = 1;
    while (k * 2 < n) {
        k *= 2;
    }
    return k;
}

Hash32 subtree_root(std::span<const Hash32> leaves) {
    if (leaves.empty()) {
        return empty_root();
    }
    if (leaves.size() == 1) {
        return leaves[0];
    }
    uint64_t k = split_point(leaves.size());
    return node_hash(subtree_root(leaves.subspan(0, k)), subtree_root(leaves.subspan(k)));
}

void inclusion_path(std::span<const Hash32> leaves, uint64_t index, std::vector<Hash32>& out) {
    if (leaves.size() <= 1) {
        return;
    }
    uint64_t k = split_point(leaves.size());
    if (index < k) {
        inclusion_path(leaves.subspan(0, k), index, out);
        out.push_back(subtree_root(leaves.subspan(k)));
    } else {
        inclusion_path(leaves.subspan(k), index - k, out);
        out.push_back(subtree_root(leaves.subspan(0, k)));
    }
}

void consistency_subproof(std::span<const Hash32> leaves, uint64_t m, bool whole_is_old,
                          std::vector<Hash32>& out) {
    if (m == leaves.size()) {
        if (!whole_is_old) {
            out.push_back(subtree_root(leaves));
        }
        return;
    }
    uint64_t k = split_point(leaves.size());
    if (m <= k) {
        consistency_subproof(leaves.subspan(0, k), m, whole_is_old, out);
        out.push_back(subtree_root(leaves.subspan(k)));
    } else {
        consistency_subproof(leaves.subspan(k), m - k, false, out);
        out.push_back(subtree_root(leaves.subspan(0, k)));
    }
}

bool is_power_of_two(uint64_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

}  // namespace

Hash32 empty_root() {
    return crypto::sha256({});
}

Hash32 leaf_hash_of(const trust::Certificate& cert) {
    Bytes buf;
    Bytes encoded = trust::serialize_certificate(cert);
    buf.reserve(encoded.size() + 1);
    buf.push_back(kLeafPrefix);
    buf.insert(buf.end(), encoded.begin(), encoded.end());
    return crypto::sha256(buf);
}

Bytes sct_signing_payload(const Fingerprint& log_id, uint64_t index, Timestamp timestamp,
                          const Hash32& leaf_hash) {
    enc::Encoder e;
    e.fixed(log_id.bytes);
    e.u64(index);
    e.i64(timestamp);
    e.fixed(leaf_hash);
    return e.take();
}

Bytes serialize_sct(const SignedCertificateTimestamp& sct) {
    enc::Encoder e;
    e.fixed(sct.log_id.bytes);
    e.u64(sct.index);
    e.i64(sct.timestamp);
    e.fixed(sct.signature.bytes);
    return e.take();
}

Result<SignedCertificateTimestamp> decode_sct(ByteSpan data) {
    enc::Decoder d(data);
    SignedCertificateTimestamp sct;
    sct.log_id.bytes = d.fixed<32>();
    sct.index = d.u64();
    sct.timestamp = d.i64();
    sct.signature.bytes = d.fixed<64>();
    if (!d.done()) {
        return Result<SignedCertificateTimestamp>::failure(Err::MalformedInput, "malformed SCT");
    }
    return Result<SignedCertificateTimestamp>::success(sct);
}

Result<void> verify_sct(const SignedCertificateTimestamp& sct, const trust::Certificate& cert,
                        const crypto::VerifyKey& log_key) {
    if (sct.log_id != trust::fingerprint(log_key)) {
        return Result<void>::failure(Err::SignatureInvalid, "SCT names a different log");
    }
    Bytes payload = sct_signing_payload(sct.log_id, sct.index, sct.timestamp, leaf_hash_of(cert));
    if (!crypto::verify(payload, sct.signature, log_key)) {
        return Result<void>::failure(Err::SignatureInvalid, "SCT signature does not verify");
    }
    return Result<void>::success();
}

Bytes serialize_log_entry(const LogEntry& entry) {
    enc::Encoder e;
    e.u64(entry.index);
    e.fixed(entry.leaf_hash);
    e.bytes(trust::serialize_certificate(entry.certificate));
    e.i64(entry.timestamp);
    return e.take();
}

Result<LogEntry> decode_log_entry(ByteSpan data) {
    enc::Decoder d(data);
    LogEntry entry;
    entry.index = d.u64();
    entry.leaf_hash = d.fixed<32>();
    auto cert = trust::decode_certificate(d.bytes());
    entry.timestamp = d.i64();
    if (!cert || !d.done()) {
        return Result<LogEntry>::failure(Err::MalformedInput, "malformed log entry");
    }
    entry.certificate = std::move(cert.value);
    return Result<LogEntry>::success(std::move(entry));
}

Log Log::create(crypto::KeyPair keys) {
    Log log;
    log.keys_ = keys;
    return log;
}

Result<Log> Log::open(const std::filesystem::path& dir, std::optional<crypto::KeyPair> keys) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    const auto key_path = dir / "log.key";
    const auto journal_path = dir / "log.journal";
    const auto checkpoint_path = dir / "checkpoint";

    Log log;
    log.checkpoint_path_ = checkpoint_path;

    if (std::filesystem::exists(key_path)) {
        std::ifstream in(key_path, std::ios::binary);
        Bytes raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (raw.size() != 64) {
            return Result<Log>::failure(Err::MalformedInput, "corrupt log key file");
        }
        std::copy(raw.begin(), raw.end(), log.keys_.secret.bytes.begin());
        log.keys_.public_key = log.keys_.secret.verify_key();
    } else {
        log.keys_ = keys ? *keys : crypto::generate_keypair();
        std::ofstream out(key_path, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(log.keys_.secret.bytes.data()), 64);
        if (!out) {
            return Result<Log>::failure(Err::IoError, "cannot write log key");
        }
        std::filesystem::permissions(key_path, std::filesystem::perms::owner_read |
                                                   std::filesystem::perms::owner_write,
                                     ec);
    }

    if (std::filesystem::exists(journal_path)) {
        auto records = Journal::read_all(journal_path);
        if (!records) {
            return forward_failure<Log>(records);
        }
        for (const auto& raw : records.value) {
            auto entry = decode_log_entry(raw);
            if (!entry) {
                return forward_failure<Log>(entry);
            }
            if (entry.value.index != log.entries_.size()) {
                return Result<Log>::failure(Err::MalformedInput, "log journal indices out of order");
            }
            log.leaves_.push_back(entry.value.leaf_hash);
            log.entries_.push_back(std::move(entry.value));
        }
    }

    if (std::filesystem::exists(checkpoint_path)) {
        std::ifstream in(checkpoint_path);
        uint64_t size = 0;
        std::string root_hex;
        in >> size >> root_hex;
        auto stored = array_from_hex<32>(root_hex);
        if (!in || !stored) {
            return Result<Log>::failure(Err::MalformedInput, "corrupt log checkpoint");
        }
        // A checkpoint may lag the journal by a crash window, but the journal
        // must extend it: the replayed tree at the checkpointed size has to
        // reproduce the checkpointed root.
        auto at_checkpoint = log.root_hash(size);
        if (!at_checkpoint || at_checkpoint.value != *stored) {
            return Result<Log>::failure(Err::MalformedInput,
                                        "log journal does not extend its checkpoint");
        }
    }

    auto journal = Journal::open(journal_path);
    if (!journal) {
        return forward_failure<Log>(journal);
    }
    log.journal_ = std::make_shared<Journal>(std::move(journal.value));
    return Result<Log>::success(std::move(log));
}

Result<SignedCertificateTimestamp> Log::append(const trust::Certificate& cert, Timestamp now) {
    LogEntry entry;
    entry.index = entries_.size();
    entry.leaf_hash = leaf_hash_of(cert);
    entry.certificate = cert;
    entry.timestamp = now;

    if (journal_ && journal_->is_open()) {
        if (auto r = journal_->append(serialize_log_entry(entry)); !r) {
            return forward_failure<SignedCertificateTimestamp>(r);
        }
    }
    leaves_.push_back(entry.leaf_hash);
    entries_.push_back(entry);

    if (!checkpoint_path_.empty()) {
        std::ofstream out(checkpoint_path_, std::ios::trunc);
        out << size() << ' ' << to_hex(current_root()) << '\n';
    }

    SignedCertificateTimestamp sct;
    sct.log_id = log_id();
    sct.index = entry.index;
    sct.timestamp = now;
    sct.signature = crypto::sign(
        sct_signing_payload(sct.log_id, sct.index, sct.timestamp, entry.leaf_hash), keys_.secret);
    return Result<SignedCertificateTimestamp>::success(sct);
}

Result<Hash32> Log::root_hash(uint64_t tree_size) const {
    if (tree_size > size()) {
        return Result<Hash32>::failure(Err::SizeOutOfRange, "tree size exceeds log size");
    }
    return Result<Hash32>::success(subtree_root(std::span(leaves_).subspan(0, tree_size)));
}

Hash32 Log::current_root() const {
    return subtree_root(leaves_);
}

Result<InclusionProof> Log::inclusion_proof(uint64_t index, uint64_t tree_size) const {
    if (tree_size > size()) {
        return Result<InclusionProof>::failure(Err::SizeOutOfRange, "tree size exceeds log size");
    }
    if (index >= tree_size) {
        return Result<InclusionProof>::failure(Err::IndexOutOfRange, "index outside the tree");
    }
    InclusionProof proof;
    proof.index = index;
    proof.tree_size = tree_size;
    inclusion_path(std::span(leaves_).subspan(0, tree_size), index, proof.path);
    return Result<InclusionProof>::success(std::move(proof));
}

Result<ConsistencyProof> Log::consistency_proof(uint64_t old_size, uint64_t new_size) const {
    if (old_size > new_size || new_size > size() || old_size == 0) {
        return Result<ConsistencyProof>::failure(Err::SizeOutOfRange,
                                                 "need 0 < old_size <= new_size <= log size");
    }
    ConsistencyProof proof;
    proof.old_size = old_size;
    proof.new_size = new_size;
    if (old_size != new_size) {
        consistency_subproof(std::span(leaves_).subspan(0, new_size), old_size, true, proof.path);
    }
    return Result<ConsistencyProof>::success(std::move(proof));
}

bool verify_inclusion(const InclusionProof& proof, const Hash32& leaf_hash, const Hash32& root) {
    if (proof.index >= proof.tree_size) {
        return false;
    }
    uint64_t fn = proof.index;
    uint64_t sn = proof.tree_size - 1;
    Hash32 r = leaf_hash;
    for (const Hash32& p : proof.path) {
        if (sn == 0) {
            return false;
        }
        if ((fn & 1) != 0 || fn == sn) {
            r = node_hash(p, r);
            if ((fn & 1) == 0) {
                while (fn != 0 && (fn & 1) == 0) {
                    fn >>= 1;
                    sn >>= 1;
                }
            }
        } else {
            r = node_hash(r, p);
        }
        fn >>= 1;
        sn >>= 1;
    }
    return sn == 0 && r == root;
}

bool verify_consistency(const ConsistencyProof& proof, const Hash32& old_root,
                        const Hash32& new_root) {
    const uint64_t first = proof.old_size;
    const uint64_t second = proof.new_size;
    if (first == 0 || first > second) {
        return false;
    }
    if (first == second) {
        return proof.path.empty() && old_root == new_root;
    }

    std::vector<Hash32> path = proof.path;
    if (is_power_of_two(first)) {
        path.insert(path.begin(), old_root);
    }
    if (path.empty()) {
        return false;
    }

    uint64_t fn = first - 1;
    uint64_t sn = second - 1;
    while ((fn & 1) != 0) {
        fn >>= 1;
        sn >>= 1;
    }
    Hash32 fr = path.front();
    Hash32 sr = path.front();
    for (size_t i = 1; i < path.size(); ++i) {
        const Hash32& c = path[i];
        if (sn == 0) {
            return false;
        }
        if ((fn & 1) != 0 || fn == sn) {
            fr = node_hash(c, fr);
            sr = node_hash(c, sr);
            if ((fn & 1) == 0) {
                while (fn != 0 && (fn & 1) == 0) {
                    fn >>= 1;
                    sn >>= 1;
                }
            }
        } else {
            sr = node_hash(sr, c);
        }
        fn >>= 1;
        sn >>= 1;
    }
    return sn == 0 && fr == old_root && sr == new_root;
}

const char* to_string(AlertKind kind) {
    switch (kind) {
        case AlertKind::TrustedWithoutEvidence: return "TrustedWithoutEvidence";
        case AlertKind::DuplicateActiveCert: return "DuplicateActiveCert";
        case AlertKind::UnknownIssuer: return "UnknownIssuer";
    }
    return "?";
}

void add_registry_to_context(MonitorContext& ctx, const authority::CaState& ca) {
    Fingerprint issuer = ca.fingerprint();
    ctx.known_issuers.insert(issuer);
    for (const auto& [serial, record] : ca.issued) {
        if (record.evidence_snapshot) {
            ctx.evidence.emplace(std::make_pair(issuer, serial), *record.evidence_snapshot);
        }
    }
    for (const auto& [serial, record] : ca.revoked) {
        ctx.revoked.insert({issuer, serial});
    }
}

std::vector<MonitorAlert> monitor_scan(const Log& log, const MonitorContext& ctx) {
    std::vector<MonitorAlert> alerts;

    // Unrevoked developer issuances seen so far, keyed by developer key.
    std::map<Fingerprint, std::set<std::pair<Fingerprint, Serial>>> active_by_developer;

    for (const LogEntry& entry : log.entries()) {
        const trust::Certificate& cert = entry.certificate;
        const Fingerprint issuer = cert.body.issuer_fingerprint;
        const auto issuance = std::make_pair(issuer, cert.body.serial);

        if (!ctx.known_issuers.contains(issuer)) {
            alerts.push_back({AlertKind::UnknownIssuer, entry.index,
                              "issuer " + issuer.hex().substr(0, 16) + " is not a registered CA"});
        }

        if (cert.body.role != trust::CertificateRole::Developer) {
            continue;
        }

        if (cert.trust_level() == trust::TrustLevel::Trusted) {
            auto it = ctx.evidence.find(issuance);
            bool justified =
                it != ctx.evidence.end() &&
                authority::evaluate_policy(it->second, ctx.thresholds) == trust::TrustLevel::Trusted;
            if (!justified) {
                alerts.push_back({AlertKind::TrustedWithoutEvidence, entry.index,
                                  "serial " + cert.body.serial.hex() +
                                      " is Trusted without qualifying evidence"});
            }
        }

        if (!ctx.revoked.contains(issuance)) {
            auto& active = active_by_developer[cert.subject_key_fingerprint()];
            if (active.insert(issuance).second && active.size() > 1) {
                alerts.push_back({AlertKind::DuplicateActiveCert, entry.index,
                                  "developer " +
                                      cert.subject_key_fingerprint().hex().substr(0, 16) +
                                      " holds multiple unrevoked certificates"});
            }
        }
    }
    return alerts;
}

Result<SignedCertificateTimestamp> InProcessSubmitter::submit(const trust::Certificate& cert) {
    std::lock_guard lock(mutex_);
    return log_->append(cert, clock_());
}

}  // namespace dcm::ctlog
