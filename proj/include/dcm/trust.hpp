// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// Certificate data model: subjects, roles, trust levels, canonical encoding,
// signatures, and chain validation. Everything here is an immutable value and
// every operation is a pure function.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcm/common.hpp"
#include "dcm/crypto.hpp"

namespace dcm::trust {

/// Developer standing. The underlying order is the severity order used for
/// comparisons: Trusted < Unknown < Warning < Critical.
enum class TrustLevel : uint8_t { Trusted = 0, Unknown = 1, Warning = 2, Critical = 3 };

constexpr int severity(TrustLevel level) { return static_cast<int>(level); }
const char* to_string(TrustLevel level);
std::optional<TrustLevel> trust_level_from_name(std::string_view name);

/// Transition relation between trust levels on reevaluation:
///   Unknown  -> Unknown | Trusted | Warning | Critical
///   Trusted  -> Trusted | Warning | Critical
///   Warning  -> Warning | Trusted | Critical
///   Critical -> Critical | Warning
bool transition_allowed(TrustLevel current, TrustLevel next);

/// Threat severities; only the two threat-bearing levels exist here.
enum class Severity : uint8_t { Warning = 0, Critical = 1 };

const char* to_string(Severity severity);
std::optional<Severity> severity_from_name(std::string_view name);
TrustLevel to_trust_level(Severity severity);

enum class CertificateRole : uint8_t { Root = 0, Intermediate = 1, Developer = 2 };

const char* to_string(CertificateRole role);

struct SubjectIdentity {
    std::string common_name;
    std::string organization;
    std::optional<std::string> organizational_unit;
    std::optional<std::string> locality;
    std::optional<std::string> state_region;
    std::string country;  // empty, or exactly two uppercase ASCII letters
    std::optional<std::string> email;

    bool operator==(const SubjectIdentity&) const = default;
};

Result<void> check_identity(const SubjectIdentity& identity);

inline constexpr std::string_view kTrustLevelExtension = "dcm.trust_level";
/// Free-text note attached by a CA when it issues at Warning with open threats;
/// surfaced to the user by the install prompt.
inline constexpr std::string_view kThreatSummaryExtension = "dcm.threat_summary";

struct CertificateBody {
    Serial serial{};
    CertificateRole role = CertificateRole::Developer;
    SubjectIdentity subject;
    crypto::VerifyKey subject_public_key;
    Fingerprint issuer_fingerprint;
    Timestamp not_before = 0;
    Timestamp not_after = 0;
    std::map<std::string, std::string> extensions;  // sorted keys; canonical order

    bool operator==(const CertificateBody&) const = default;
};

/// Field sanity: subject identity shape and not_before < not_after.
Result<void> check_body_fields(const CertificateBody& body);

/// Full invariants: field sanity plus the role/extension coupling — Developer
/// bodies must carry a valid trust-level extension, Root/Intermediate must not.
Result<void> check_body(const CertificateBody& body);

/// Raw serialization of a body. Total: encodes whatever it is given, so that
/// signature checks and transparency logging work on mis-issued certificates
/// exactly as they arrived.
Bytes serialize_body(const CertificateBody& body);

/// Checked encoding: validates invariants (InvalidBody), then serializes.
Result<Bytes> canonical_encode(const CertificateBody& body);

/// Structural decode; does not re-check issuance invariants.
Result<CertificateBody> decode_body(ByteSpan data);

struct Certificate {
    CertificateBody body;
    crypto::Signature signature;

    bool operator==(const Certificate&) const = default;

    [[nodiscard]] std::optional<TrustLevel> trust_level() const;
    [[nodiscard]] std::optional<std::string> threat_summary() const;
    [[nodiscard]] Fingerprint subject_key_fingerprint() const;
};

Bytes serialize_certificate(const Certificate& cert);
Result<Certificate> decode_certificate(ByteSpan data);

Result<Certificate> sign_certificate(const CertificateBody& body, const crypto::SigningKey& issuer_secret);
Result<void> verify_certificate_signature(const Certificate& cert, const crypto::VerifyKey& issuer_public);

Fingerprint fingerprint(const crypto::VerifyKey& key);

/// Ordered leaf-first: [developer_cert, intermediate_cert..., root_cert].
using CertificateChain = std::vector<Certificate>;

Bytes serialize_chain(const CertificateChain& chain);
Result<CertificateChain> decode_chain(ByteSpan data);

struct LinkReport {
    bool signature_ok = false;
    bool validity_ok = false;
    bool role_ok = false;  // role ordering and issuer-fingerprint linkage
    /// Problems in check order: role/linkage, validity, signature.
    std::vector<Err> problems;
};

struct ChainReport {
    std::vector<LinkReport> links;
    bool anchor_ok = false;
    bool ok = false;
    /// First problem scanning links leaf to root, with the anchor check last.
    Err first_problem = Err::None;
};

/// Walks the chain leaf to root: each link's signature must verify under the
/// next link's key (the root under its own), validity windows must contain
/// `now`, roles must run Developer? -> Intermediate* -> Root, and the root must
/// be one of the anchors. All failures are reported, never thrown.
ChainReport validate_chain(const CertificateChain& chain, const std::vector<Certificate>& anchors,
                           Timestamp now);

// Certificate files: 4-byte magic "DCM1" followed by the serialized certificate.
inline constexpr std::array<uint8_t, 4> kCertificateMagic = {'D', 'C', 'M', '1'};

Result<void> write_certificate_file(const std::filesystem::path& path, const Certificate& cert);
Result<Certificate> read_certificate_file(const std::filesystem::path& path);

/// Human-readable JSON dump (non-authoritative debug view).
std::string certificate_to_json(const Certificate& cert);

}  // namespace dcm::trust
