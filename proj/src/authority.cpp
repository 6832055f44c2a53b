// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/authority.hpp"

#include <algorithm>

#include "dcm/encoding.hpp"

namespace dcm::authority {

namespace {

// Journal record tags.
constexpr uint8_t kRecordCaInit = 0;
constexpr uint8_t kRecordIssued = 1;
constexpr uint8_t kRecordRevoked = 2;

Result<void> journal_append(CaState& ca, ByteSpan record) {
    if (!ca.journal || !ca.journal->is_open()) {
        return Result<void>::success();
    }
    return ca.journal->append(record);
}

Bytes ca_init_record(const trust::Certificate& cert) {
    enc::Encoder e;
    e.u8(kRecordCaInit);
    e.bytes(trust::serialize_certificate(cert));
    return e.take();
}

Bytes issued_record(const IssuanceRecord& record) {
    enc::Encoder e;
    e.u8(kRecordIssued);
    e.bytes(serialize_issuance_record(record));
    return e.take();
}

Bytes revoked_record(const RevocationRecord& record) {
    enc::Encoder e;
    e.u8(kRecordRevoked);
    e.fixed(record.serial.bytes);
    e.i64(record.revoked_at);
    e.u8(static_cast<uint8_t>(record.reason));
    return e.take();
}

Serial bump(const Serial& a, const Serial& b) {
    return std::max(a, b.next());
}

/// Counter floor implied by the state: one past the largest serial this CA
/// has handed out, counting its own certificate only when self-issued.
Serial recomputed_next_serial(const CaState& ca) {
    Serial next = Serial::from_u64(1);
    const auto& own = ca.own_certificate.body;
    if (own.issuer_fingerprint == trust::fingerprint(own.subject_public_key)) {
        next = bump(next, own.serial);
    }
    for (const auto& [serial, record] : ca.issued) {
        next = bump(next, serial);
    }
    return next;
}

Result<DeveloperIssuance> record_developer_issuance(CaState& ica, trust::Certificate cert,
                                                    const PolicyEvidence& evidence,
                                                    std::optional<trust::TrustLevel> shortfall,
                                                    ctlog::CtSubmitter& ctlog) {
    // Log before release: the certificate exists in the registry only once the
    // transparency log has acknowledged it.
    auto sct = ctlog.submit(cert);
    if (!sct) {
        return Result<DeveloperIssuance>::failure(Err::CtLogUnreachable, sct.message);
    }
    IssuanceRecord record{cert, evidence, sct.value, shortfall};
    if (auto logged = journal_append(ica, issued_record(record)); !logged) {
        return forward_failure<DeveloperIssuance>(logged);
    }
    ica.issued.emplace(cert.body.serial, std::move(record));
    ica.next_serial = bump(ica.next_serial, cert.body.serial);
    return Result<DeveloperIssuance>::success(DeveloperIssuance{std::move(cert), sct.value});
}

}  // namespace

trust::TrustLevel evaluate_policy(const PolicyEvidence& evidence, const PolicyThresholds& thresholds) {
    bool any_critical = false;
    bool any_warning = false;
    for (const auto& threat : evidence.open_threats) {
        any_critical |= threat.severity == trust::Severity::Critical;
        any_warning |= threat.severity == trust::Severity::Warning;
    }
    if (any_critical) {
        return trust::TrustLevel::Critical;
    }
    if (any_warning) {
        return trust::TrustLevel::Warning;
    }
    if (evidence.identity_verified && evidence.oldest_app_age_days > thresholds.min_track_record_days &&
        evidence.total_installs > thresholds.min_installs && evidence.open_threats.empty()) {
        return trust::TrustLevel::Trusted;
    }
    return trust::TrustLevel::Unknown;
}

trust::TrustLevel step_toward(trust::TrustLevel current, trust::TrustLevel target) {
    const int from = trust::severity(current);
    const int to = trust::severity(target);
    const int dir = to > from ? 1 : -1;
    for (int lv = to; lv != from; lv -= dir) {
        auto candidate = static_cast<trust::TrustLevel>(lv);
        if (trust::transition_allowed(current, candidate)) {
            return candidate;
        }
    }
    return current;
}

const char* to_string(RevocationReason reason) {
    switch (reason) {
        case RevocationReason::TrustLevelChange: return "TrustLevelChange";
        case RevocationReason::KeyCompromise: return "KeyCompromise";
        case RevocationReason::PolicyViolation: return "PolicyViolation";
        case RevocationReason::CaMisissuance: return "CaMisissuance";
    }
    return "?";
}

std::optional<RevocationReason> revocation_reason_from_name(std::string_view name) {
    if (name == "TrustLevelChange") return RevocationReason::TrustLevelChange;
    if (name == "KeyCompromise") return RevocationReason::KeyCompromise;
    if (name == "PolicyViolation") return RevocationReason::PolicyViolation;
    if (name == "CaMisissuance") return RevocationReason::CaMisissuance;
    return std::nullopt;
}

Fingerprint CaState::fingerprint() const {
    return trust::fingerprint(own_certificate.body.subject_public_key);
}

bool registries_equal(const CaState& a, const CaState& b) {
    return a.own_certificate == b.own_certificate && a.next_serial == b.next_serial &&
           a.issued == b.issued && a.revoked == b.revoked;
}

Result<CaState> init_root(const trust::SubjectIdentity& identity, int64_t lifetime_days,
                          Timestamp now, std::optional<Hash32> key_seed) {
    if (lifetime_days <= 0) {
        return Result<CaState>::failure(Err::InvalidIdentity, "lifetime_days must be positive");
    }
    if (auto id = trust::check_identity(identity); !id) {
        return forward_failure<CaState>(id);
    }
    crypto::KeyPair keys = key_seed ? crypto::keypair_from_seed(*key_seed) : crypto::generate_keypair();

    trust::CertificateBody body;
    body.serial = Serial::from_u64(1);
    body.role = trust::CertificateRole::Root;
    body.subject = identity;
    body.subject_public_key = keys.public_key;
    body.issuer_fingerprint = trust::fingerprint(keys.public_key);
    body.not_before = now;
    body.not_after = now + lifetime_days * kSecondsPerDay;

    auto cert = trust::sign_certificate(body, keys.secret);
    if (!cert) {
        return forward_failure<CaState>(cert);
    }
    CaState state;
    state.own_certificate = std::move(cert.value);
    state.secret_key = keys.secret;
    state.next_serial = Serial::from_u64(2);  // serial 1 went to the self-signed certificate
    return Result<CaState>::success(std::move(state));
}

Result<std::pair<trust::Certificate, CaState>> issue_intermediate(
    CaState& root, const trust::SubjectIdentity& identity, int64_t lifetime_days, Timestamp now,
    std::optional<Hash32> key_seed) {
    using Out = Result<std::pair<trust::Certificate, CaState>>;
    if (root.role() != trust::CertificateRole::Root) {
        return Out::failure(Err::NotARoot, "only a Root CA issues intermediates");
    }
    if (lifetime_days <= 0) {
        return Out::failure(Err::InvalidIdentity, "lifetime_days must be positive");
    }
    crypto::KeyPair keys = key_seed ? crypto::keypair_from_seed(*key_seed) : crypto::generate_keypair();

    trust::CertificateBody body;
    body.serial = root.next_serial;
    body.role = trust::CertificateRole::Intermediate;
    body.subject = identity;
    body.subject_public_key = keys.public_key;
    body.issuer_fingerprint = root.fingerprint();
    body.not_before = now;
    body.not_after = now + lifetime_days * kSecondsPerDay;

    auto cert = trust::sign_certificate(body, root.secret_key);
    if (!cert) {
        return forward_failure<std::pair<trust::Certificate, CaState>>(cert);
    }

    IssuanceRecord record{cert.value, std::nullopt, std::nullopt, std::nullopt};
    if (auto logged = journal_append(root, issued_record(record)); !logged) {
        return forward_failure<std::pair<trust::Certificate, CaState>>(logged);
    }
    root.issued.emplace(body.serial, std::move(record));
    root.next_serial = root.next_serial.next();

    CaState ica;
    ica.own_certificate = cert.value;
    ica.secret_key = keys.secret;
    ica.next_serial = Serial::from_u64(1);
    return Out::success({std::move(cert.value), std::move(ica)});
}

Result<DeveloperIssuance> issue_developer_at(CaState& ica, const trust::SubjectIdentity& identity,
                                             const crypto::VerifyKey& developer_key,
                                             const PolicyEvidence& evidence,
                                             trust::TrustLevel level,
                                             std::optional<trust::TrustLevel> shortfall_target,
                                             int64_t lifetime_days, ctlog::CtSubmitter& ctlog,
                                             Timestamp now) {
    if (ica.role() != trust::CertificateRole::Intermediate) {
        return Result<DeveloperIssuance>::failure(Err::NotAnIntermediate,
                                                  "only an intermediate CA certifies developers");
    }
    if (lifetime_days <= 0) {
        return Result<DeveloperIssuance>::failure(Err::InvalidIdentity,
                                                  "lifetime_days must be positive");
    }

    trust::CertificateBody body;
    body.serial = ica.next_serial;
    body.role = trust::CertificateRole::Developer;
    body.subject = identity;
    body.subject_public_key = developer_key;
    body.issuer_fingerprint = ica.fingerprint();
    body.not_before = now;
    body.not_after = now + lifetime_days * kSecondsPerDay;
    body.extensions.emplace(std::string(trust::kTrustLevelExtension), trust::to_string(level));
    if (level == trust::TrustLevel::Warning && !evidence.open_threats.empty()) {
        std::string summary;
        for (const auto& threat : evidence.open_threats) {
            if (!summary.empty()) {
                summary += ", ";
            }
            summary += threat.event_id;
        }
        body.extensions.emplace(std::string(trust::kThreatSummaryExtension), summary);
    }

    auto cert = trust::sign_certificate(body, ica.secret_key);
    if (!cert) {
        return forward_failure<DeveloperIssuance>(cert);
    }
    return record_developer_issuance(ica, std::move(cert.value), evidence, shortfall_target, ctlog);
}

Result<DeveloperIssuance> issue_developer(CaState& ica, const trust::SubjectIdentity& identity,
                                          const crypto::VerifyKey& developer_key,
                                          const PolicyEvidence& evidence, int64_t lifetime_days,
                                          ctlog::CtSubmitter& ctlog, Timestamp now,
                                          const PolicyThresholds& thresholds) {
    trust::TrustLevel level = evaluate_policy(evidence, thresholds);
    return issue_developer_at(ica, identity, developer_key, evidence, level, std::nullopt,
                              lifetime_days, ctlog, now);
}

Result<void> revoke(CaState& ca, const Serial& serial, RevocationReason reason, Timestamp now) {
    if (!ca.issued.contains(serial)) {
        return Result<void>::failure(Err::UnknownSerial, "serial not issued by this CA");
    }
    if (ca.revoked.contains(serial)) {
        return Result<void>::failure(Err::AlreadyRevoked, "serial already revoked");
    }
    RevocationRecord record{serial, now, reason};
    if (auto logged = journal_append(ca, revoked_record(record)); !logged) {
        return logged;
    }
    ca.revoked.emplace(serial, record);
    return Result<void>::success();
}

Result<ReevaluationOutcome> reevaluate(CaState& ca, const Fingerprint& developer,
                                       const PolicyEvidence& new_evidence,
                                       ctlog::CtSubmitter& ctlog, Timestamp now,
                                       const PolicyThresholds& thresholds) {
    using Out = Result<ReevaluationOutcome>;

    const IssuanceRecord* active = nullptr;
    size_t active_count = 0;
    for (const auto& [serial, record] : ca.issued) {
        if (record.certificate.body.role != trust::CertificateRole::Developer ||
            ca.revoked.contains(serial)) {
            continue;
        }
        if (record.certificate.subject_key_fingerprint() == developer) {
            active = &record;
            ++active_count;
        }
    }
    if (active_count != 1) {
        return Out::failure(Err::NoActiveCertificate,
                            active_count == 0 ? "developer has no unrevoked certificate"
                                              : "developer has multiple unrevoked certificates");
    }

    auto current = active->certificate.trust_level();
    if (!current) {
        return Out::failure(Err::MissingTrustLevel, "active certificate lacks a trust level");
    }
    trust::TrustLevel target = evaluate_policy(new_evidence, thresholds);
    if (target == *current) {
        return Out::success(ReevaluationOutcome{false, *current, std::nullopt, std::nullopt});
    }
    trust::TrustLevel stepped = step_toward(*current, target);
    if (stepped == *current) {
        // No allowed move toward the target; the level stands as-is.
        return Out::success(ReevaluationOutcome{false, *current, std::nullopt, std::nullopt});
    }

    const trust::CertificateBody& old_body = active->certificate.body;
    Serial old_serial = old_body.serial;
    int64_t lifetime_days = (old_body.not_after - old_body.not_before) / kSecondsPerDay;
    trust::SubjectIdentity identity = old_body.subject;
    crypto::VerifyKey key = old_body.subject_public_key;

    if (auto revoked = revoke(ca, old_serial, RevocationReason::TrustLevelChange, now); !revoked) {
        return forward_failure<ReevaluationOutcome>(revoked);
    }
    std::optional<trust::TrustLevel> shortfall =
        stepped == target ? std::nullopt : std::optional(target);
    auto issued = issue_developer_at(ca, identity, key, new_evidence, stepped, shortfall,
                                     lifetime_days, ctlog, now);
    if (!issued) {
        return forward_failure<ReevaluationOutcome>(issued);
    }
    return Out::success(ReevaluationOutcome{true, stepped, issued.value.certificate,
                                            issued.value.sct});
}

Bytes serialize_evidence(const PolicyEvidence& evidence) {
    enc::Encoder e;
    e.u8(evidence.identity_verified ? 1 : 0);
    e.i64(evidence.oldest_app_age_days);
    e.i64(evidence.total_installs);
    e.u32(static_cast<uint32_t>(evidence.open_threats.size()));
    for (const auto& threat : evidence.open_threats) {
        e.u8(static_cast<uint8_t>(threat.severity));
        e.str(threat.event_id);
    }
    return e.take();
}

Result<PolicyEvidence> decode_evidence(ByteSpan data) {
    enc::Decoder d(data);
    PolicyEvidence evidence;
    evidence.identity_verified = d.u8() != 0;
    evidence.oldest_app_age_days = d.i64();
    evidence.total_installs = d.i64();
    uint32_t threats = d.u32();
    for (uint32_t i = 0; i < threats && !d.failed(); ++i) {
        OpenThreat threat;
        threat.severity = static_cast<trust::Severity>(d.u8());
        threat.event_id = d.str();
        evidence.open_threats.push_back(std::move(threat));
    }
    if (!d.done()) {
        return Result<PolicyEvidence>::failure(Err::MalformedInput, "malformed evidence record");
    }
    return Result<PolicyEvidence>::success(std::move(evidence));
}

Bytes serialize_issuance_record(const IssuanceRecord& record) {
    enc::Encoder e;
    e.bytes(trust::serialize_certificate(record.certificate));
    e.u8(record.evidence_snapshot.has_value() ? 1 : 0);
    if (record.evidence_snapshot) {
        e.bytes(serialize_evidence(*record.evidence_snapshot));
    }
    e.u8(record.sct.has_value() ? 1 : 0);
    if (record.sct) {
        e.bytes(ctlog::serialize_sct(*record.sct));
    }
    e.u8(record.shortfall_target.has_value() ? 1 : 0);
    if (record.shortfall_target) {
        e.u8(static_cast<uint8_t>(*record.shortfall_target));
    }
    return e.take();
}

Result<IssuanceRecord> decode_issuance_record(ByteSpan data) {
    using Out = Result<IssuanceRecord>;
    enc::Decoder d(data);
    IssuanceRecord record;

    auto cert = trust::decode_certificate(d.bytes());
    if (!cert) {
        return forward_failure<IssuanceRecord>(cert);
    }
    record.certificate = std::move(cert.value);

    if (d.u8() != 0) {
        auto evidence = decode_evidence(d.bytes());
        if (!evidence) {
            return forward_failure<IssuanceRecord>(evidence);
        }
        record.evidence_snapshot = std::move(evidence.value);
    }
    if (d.u8() != 0) {
        auto sct = ctlog::decode_sct(d.bytes());
        if (!sct) {
            return forward_failure<IssuanceRecord>(sct);
        }
        record.sct = sct.value;
    }
    if (d.u8() != 0) {
        record.shortfall_target = static_cast<trust::TrustLevel>(d.u8());
    }
    if (!d.done()) {
        return Out::failure(Err::MalformedInput, "malformed issuance record");
    }
    return Out::success(std::move(record));
}

Result<void> bind_journal(CaState& ca, const std::filesystem::path& path) {
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
    auto journal = Journal::open(path);
    if (!journal) {
        return Result<void>::failure(journal.code, journal.message);
    }
    ca.journal = std::make_shared<Journal>(std::move(journal.value));
    if (!fresh) {
        return Result<void>::success();
    }
    if (auto r = ca.journal->append(ca_init_record(ca.own_certificate)); !r) {
        return r;
    }
    for (const auto& [serial, record] : ca.issued) {
        if (auto r = ca.journal->append(issued_record(record)); !r) {
            return r;
        }
    }
    for (const auto& [serial, record] : ca.revoked) {
        if (auto r = ca.journal->append(revoked_record(record)); !r) {
            return r;
        }
    }
    return Result<void>::success();
}

Result<CaState> load_ca(const std::filesystem::path& journal_path, const crypto::SigningKey& key) {
    auto records = Journal::read_all(journal_path);
    if (!records) {
        return forward_failure<CaState>(records);
    }
    CaState state;
    state.secret_key = key;
    bool saw_init = false;
    for (const auto& raw : records.value) {
        enc::Decoder d(raw);
        uint8_t tag = d.u8();
        switch (tag) {
            case kRecordCaInit: {
                auto cert = trust::decode_certificate(d.bytes());
                if (!cert || !d.done()) {
                    return Result<CaState>::failure(Err::MalformedInput, "corrupt CA init record");
                }
                state.own_certificate = std::move(cert.value);
                saw_init = true;
                break;
            }
            case kRecordIssued: {
                auto record = decode_issuance_record(d.bytes());
                if (!record || !d.done()) {
                    return Result<CaState>::failure(Err::MalformedInput, "corrupt issuance record");
                }
                Serial serial = record.value.certificate.body.serial;
                state.issued.emplace(serial, std::move(record.value));
                break;
            }
            case kRecordRevoked: {
                RevocationRecord record;
                record.serial.bytes = d.fixed<16>();
                record.revoked_at = d.i64();
                record.reason = static_cast<RevocationReason>(d.u8());
                if (!d.done()) {
                    return Result<CaState>::failure(Err::MalformedInput, "corrupt revocation record");
                }
                state.revoked.emplace(record.serial, record);
                break;
            }
            default:
                return Result<CaState>::failure(Err::MalformedInput, "unknown journal record tag");
        }
    }
    if (!saw_init) {
        return Result<CaState>::failure(Err::MalformedInput, "journal lacks a CA init record");
    }
    if (state.own_certificate.body.subject_public_key != key.verify_key()) {
        return Result<CaState>::failure(Err::KeyMismatch,
                                        "signing key does not match the CA certificate");
    }
    state.next_serial = recomputed_next_serial(state);
    auto journal = Journal::open(journal_path);
    if (!journal) {
        return forward_failure<CaState>(journal);
    }
    state.journal = std::make_shared<Journal>(std::move(journal.value));
    return Result<CaState>::success(std::move(state));
}

}  // namespace dcm::authority
