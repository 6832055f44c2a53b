// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// Root and intermediate CA lifecycle: issuance, trust-level policy, the
// revocation registry, and revoke-and-reissue on trust-level change. State
// persists through an append-only journal; replaying the journal rebuilds
// the registries exactly.

#pragma once

#include <map>
#include <memory>
#include <optional>

#include "dcm/common.hpp"
#include "dcm/crypto.hpp"
#include "dcm/journal.hpp"
#include "dcm/sct.hpp"
#include "dcm/trust.hpp"

namespace dcm::authority {

/// Declared policy constants. Both comparisons are strict: a developer
/// qualifies for Trusted only beyond two full years and beyond 10000 installs.
struct PolicyThresholds {
    int64_t min_track_record_days = 730;
    int64_t min_installs = 10'000;
};

struct OpenThreat {
    trust::Severity severity = trust::Severity::Warning;
    std::string event_id;

    bool operator==(const OpenThreat&) const = default;
};

struct PolicyEvidence {
    bool identity_verified = false;
    int64_t oldest_app_age_days = 0;
    int64_t total_installs = 0;
    std::vector<OpenThreat> open_threats;

    bool operator==(const PolicyEvidence&) const = default;
};

/// Pure classification: any Critical threat wins, then any Warning threat,
/// then Trusted when the track record clears every threshold, else Unknown.
trust::TrustLevel evaluate_policy(const PolicyEvidence& evidence,
                                  const PolicyThresholds& thresholds = {});

/// The allowed level closest to `target` on the segment (current, target];
/// `current` itself when no move toward the target is allowed.
trust::TrustLevel step_toward(trust::TrustLevel current, trust::TrustLevel target);

enum class RevocationReason : uint8_t {
    TrustLevelChange = 0,
    KeyCompromise = 1,
    PolicyViolation = 2,
    CaMisissuance = 3,
};

const char* to_string(RevocationReason reason);
std::optional<RevocationReason> revocation_reason_from_name(std::string_view name);

struct RevocationRecord {
    Serial serial{};
    Timestamp revoked_at = 0;
    RevocationReason reason = RevocationReason::TrustLevelChange;

    bool operator==(const RevocationRecord&) const = default;
};

struct IssuanceRecord {
    trust::Certificate certificate;
    std::optional<PolicyEvidence> evidence_snapshot;  // always present for Developer issuances
    std::optional<ctlog::SignedCertificateTimestamp> sct;
    /// Policy asked for this level but the transition rules stepped short.
    std::optional<trust::TrustLevel> shortfall_target;

    bool operator==(const IssuanceRecord&) const = default;
};

struct CaState {
    trust::Certificate own_certificate;
    crypto::SigningKey secret_key;
    Serial next_serial = Serial::from_u64(1);
    std::map<Serial, IssuanceRecord> issued;
    std::map<Serial, RevocationRecord> revoked;
    std::shared_ptr<Journal> journal;  // optional; mutations append when bound

    [[nodiscard]] Fingerprint fingerprint() const;
    [[nodiscard]] trust::CertificateRole role() const { return own_certificate.body.role; }
};

/// Registries, counter, and own certificate match; journal binding is ignored.
bool registries_equal(const CaState& a, const CaState& b);

/// Fresh keys by default; a seed pins them for reproducible scenario setups.
Result<CaState> init_root(const trust::SubjectIdentity& identity, int64_t lifetime_days,
                          Timestamp now, std::optional<Hash32> key_seed = std::nullopt);

Result<std::pair<trust::Certificate, CaState>> issue_intermediate(
    CaState& root, const trust::SubjectIdentity& identity, int64_t lifetime_days, Timestamp now,
    std::optional<Hash32> key_seed = std::nullopt);

struct DeveloperIssuance {
    trust::Certificate certificate;
    ctlog::SignedCertificateTimestamp sct;
};

/// Policy-compliant issuance: the trust level is evaluate_policy(evidence).
/// The certificate is submitted to the transparency log and the receipt stored
/// before the certificate is released; a failed submission aborts with nothing
/// recorded.
Result<DeveloperIssuance> issue_developer(CaState& ica, const trust::SubjectIdentity& identity,
                                          const crypto::VerifyKey& developer_key,
                                          const PolicyEvidence& evidence, int64_t lifetime_days,
                                          ctlog::CtSubmitter& ctlog, Timestamp now,
                                          const PolicyThresholds& thresholds = {});

/// Issuance at a caller-chosen level. reevaluate() uses it to land on the
/// stepped level; a non-compliant CA calling it directly is exactly the
/// mis-issuance the log monitor exists to catch.
Result<DeveloperIssuance> issue_developer_at(CaState& ica, const trust::SubjectIdentity& identity,
                                             const crypto::VerifyKey& developer_key,
                                             const PolicyEvidence& evidence,
                                             trust::TrustLevel level,
                                             std::optional<trust::TrustLevel> shortfall_target,
                                             int64_t lifetime_days, ctlog::CtSubmitter& ctlog,
                                             Timestamp now);

Result<void> revoke(CaState& ca, const Serial& serial, RevocationReason reason, Timestamp now);

struct ReevaluationOutcome {
    bool reissued = false;
    trust::TrustLevel level = trust::TrustLevel::Unknown;  // level in force afterwards
    std::optional<trust::Certificate> new_certificate;
    std::optional<ctlog::SignedCertificateTimestamp> sct;
};

/// Re-runs policy for the developer's single unrevoked certificate. A changed
/// level revokes the old certificate (TrustLevelChange) and issues a fresh one
/// at the stepped level with the same total lifetime starting at `now`.
Result<ReevaluationOutcome> reevaluate(CaState& ca, const Fingerprint& developer,
                                       const PolicyEvidence& new_evidence,
                                       ctlog::CtSubmitter& ctlog, Timestamp now,
                                       const PolicyThresholds& thresholds = {});

/// Binds a journal at `path`. A fresh (empty) file is seeded with the current
/// state; an existing file is assumed to already describe it.
Result<void> bind_journal(CaState& ca, const std::filesystem::path& path);

/// Rebuilds a CaState by replaying a journal; the signing key is stored
/// separately (key files) and supplied by the caller.
Result<CaState> load_ca(const std::filesystem::path& journal_path, const crypto::SigningKey& key);

// Canonical record encodings, shared with the replay path and tests.
Bytes serialize_evidence(const PolicyEvidence& evidence);
Result<PolicyEvidence> decode_evidence(ByteSpan data);
Bytes serialize_issuance_record(const IssuanceRecord& record);
Result<IssuanceRecord> decode_issuance_record(ByteSpan data);

}  // namespace dcm::authority
