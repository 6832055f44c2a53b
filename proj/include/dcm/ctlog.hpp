// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// Append-only certificate transparency log: a Merkle tree with the standard
// 0x00/0x01 leaf/node domain separation, inclusion and consistency proofs,
// and a monitor that flags mis-issuance.

#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <set>

#include "dcm/authority.hpp"
#include "dcm/common.hpp"
#include "dcm/crypto.hpp"
#include "dcm/sct.hpp"
#include "dcm/trust.hpp"

namespace dcm::ctlog {

struct LogEntry {
    uint64_t index = 0;
    Hash32 leaf_hash{};
    trust::Certificate certificate;
    Timestamp timestamp = 0;

    bool operator==(const LogEntry&) const = default;
};

struct InclusionProof {
    uint64_t index = 0;
    uint64_t tree_size = 0;
    std::vector<Hash32> path;
};

struct ConsistencyProof {
    uint64_t old_size = 0;
    uint64_t new_size = 0;
    std::vector<Hash32> path;
};

/// Root of the empty tree: the digest of empty input.
Hash32 empty_root();

class Log {
  public:
    /// In-memory log with the given signing identity.
    static Log create(crypto::KeyPair keys);

    /// Persistent log under `dir` (journal, checkpoint, key file). Creates the
    /// directory and a fresh key on first use; on reopen, replays the journal
    /// and verifies the recomputed root against the stored checkpoint. A
    /// caller-supplied keypair overrides key generation on first use.
    static Result<Log> open(const std::filesystem::path& dir,
                            std::optional<crypto::KeyPair> keys = std::nullopt);

    Result<SignedCertificateTimestamp> append(const trust::Certificate& cert, Timestamp now);

    [[nodiscard]] uint64_t size() const { return entries_.size(); }
    [[nodiscard]] const std::vector<LogEntry>& entries() const { return entries_; }

    [[nodiscard]] Result<Hash32> root_hash(uint64_t tree_size) const;
    [[nodiscard]] Hash32 current_root() const;

    [[nodiscard]] Result<InclusionProof> inclusion_proof(uint64_t index, uint64_t tree_size) const;
    [[nodiscard]] Result<ConsistencyProof> consistency_proof(uint64_t old_size,
                                                             uint64_t new_size) const;

    [[nodiscard]] Fingerprint log_id() const { return trust::fingerprint(keys_.public_key); }
    [[nodiscard]] const crypto::VerifyKey& public_key() const { return keys_.public_key; }

    Log() = default;  // empty log with a zero identity; Result plumbing needs it

  private:
    std::vector<LogEntry> entries_;
    std::vector<Hash32> leaves_;
    crypto::KeyPair keys_;
    std::shared_ptr<Journal> journal_;
    std::filesystem::path checkpoint_path_;
};

bool verify_inclusion(const InclusionProof& proof, const Hash32& leaf_hash, const Hash32& root);
bool verify_consistency(const ConsistencyProof& proof, const Hash32& old_root,
                        const Hash32& new_root);

Bytes serialize_log_entry(const LogEntry& entry);
Result<LogEntry> decode_log_entry(ByteSpan data);

enum class AlertKind : uint8_t {
    TrustedWithoutEvidence = 0,
    DuplicateActiveCert = 1,
    UnknownIssuer = 2,
};

const char* to_string(AlertKind kind);

struct MonitorAlert {
    AlertKind kind = AlertKind::UnknownIssuer;
    uint64_t entry_index = 0;
    std::string detail;
};

/// What the monitor knows about the world: which issuers are legitimate, the
/// evidence each CA can produce per issued serial, and which issuances have
/// been revoked.
struct MonitorContext {
    std::set<Fingerprint> known_issuers;
    std::map<std::pair<Fingerprint, Serial>, authority::PolicyEvidence> evidence;
    std::set<std::pair<Fingerprint, Serial>> revoked;
    authority::PolicyThresholds thresholds;
};

/// Adds one CA's registries to the context (evidence, revocations, identity).
void add_registry_to_context(MonitorContext& ctx, const authority::CaState& ca);

/// Scans every entry: Trusted-level certificates whose issuer cannot produce
/// qualifying evidence, unrevoked duplicates per developer key, and issuers
/// outside the known set.
std::vector<MonitorAlert> monitor_scan(const Log& log, const MonitorContext& ctx);

/// Direct in-process submission; serializes appends through one mutex.
class InProcessSubmitter : public CtSubmitter {
  public:
    InProcessSubmitter(Log& log, std::function<Timestamp()> clock)
        : log_(&log), clock_(std::move(clock)) {}

    Result<SignedCertificateTimestamp> submit(const trust::Certificate& cert) override;

  private:
    Log* log_;
    std::function<Timestamp()> clock_;
    std::mutex mutex_;
};

/// Always fails; stands in for a log that is down.
class UnreachableSubmitter : public CtSubmitter {
  public:
    Result<SignedCertificateTimestamp> submit(const trust::Certificate&) override {
        return Result<SignedCertificateTimestamp>::failure(Err::CtLogUnreachable,
                                                           "transparency log unreachable");
    }
};

}  // namespace dcm::ctlog
