// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/trust.hpp"

#include <fstream>

#include <json.hpp>

#include "dcm/encoding.hpp"

namespace dcm::trust {

const char* to_string(TrustLevel level) {
    switch (level) {
        case TrustLevel::Trusted: return "Trusted";
        case TrustLevel::Unknown: return "Unknown";
        case TrustLevel::Warning: return "Warning";
        case TrustLevel::Critical: return "Critical";
    }
    return "?";
}

std::optional<TrustLevel> trust_level_from_name(std::string_view name) {
    if (name == "Trusted") return TrustLevel::Trusted;
    if (name == "Unknown") return TrustLevel::Unknown;
    if (name == "Warning") return TrustLevel::Warning;
    if (name == "Critical") return TrustLevel::Critical;
    return std::nullopt;
}

bool transition_allowed(TrustLevel current, TrustLevel next) {
    if (current == next) {
        return true;
    }
    switch (current) {
        case TrustLevel::Unknown:
            return true;
        case TrustLevel::Trusted:
        case TrustLevel::Warning:
            return next != TrustLevel::Unknown;
        case TrustLevel::Critical:
            return next == TrustLevel::Warning;
    }
    return false;
}

const char* to_string(Severity severity) {
    return severity == Severity::Critical ? "Critical" : "Warning";
}

std::optional<Severity> severity_from_name(std::string_view name) {
    if (name == "Warning") return Severity::Warning;
    if (name == "Critical") return Severity::Critical;
    return std::nullopt;
}

TrustLevel to_trust_level(Severity severity) {
    return severity == Severity::Critical ? TrustLevel::Critical : TrustLevel::Warning;
}

const char* to_string(CertificateRole role) {
    switch (role) {
        case CertificateRole::Root: return "Root";
        case CertificateRole::Intermediate: return "Intermediate";
        case CertificateRole::Developer: return "Developer";
    }
    return "?";
}

Result<void> check_identity(const SubjectIdentity& identity) {
    if (identity.common_name.empty()) {
        return Result<void>::failure(Err::InvalidIdentity, "common_name must be non-empty");
    }
    if (!identity.country.empty()) {
        bool shape_ok = identity.country.size() == 2 && identity.country[0] >= 'A' &&
                        identity.country[0] <= 'Z' && identity.country[1] >= 'A' &&
                        identity.country[1] <= 'Z';
        if (!shape_ok) {
            return Result<void>::failure(Err::InvalidIdentity,
                                         "country must be two uppercase ASCII letters");
        }
    }
    return Result<void>::success();
}

Result<void> check_body_fields(const CertificateBody& body) {
    if (auto id = check_identity(body.subject); !id) {
        return Result<void>::failure(Err::InvalidBody, id.message);
    }
    if (body.not_before >= body.not_after) {
        return Result<void>::failure(Err::InvalidBody, "not_before must precede not_after");
    }
    return Result<void>::success();
}

Result<void> check_body(const CertificateBody& body) {
    if (auto fields = check_body_fields(body); !fields) {
        return fields;
    }
    auto it = body.extensions.find(std::string(kTrustLevelExtension));
    if (body.role == CertificateRole::Developer) {
        if (it == body.extensions.end()) {
            return Result<void>::failure(Err::InvalidBody,
                                         "Developer certificate requires the trust-level extension");
        }
        if (!trust_level_from_name(it->second)) {
            return Result<void>::failure(Err::InvalidBody,
                                         "unrecognized trust level: " + it->second);
        }
    } else if (it != body.extensions.end()) {
        return Result<void>::failure(Err::InvalidBody,
                                     "only Developer certificates may carry a trust level");
    }
    return Result<void>::success();
}

Bytes serialize_body(const CertificateBody& body) {
    enc::Encoder e;
    e.fixed(body.serial.bytes);
    e.u8(static_cast<uint8_t>(body.role));
    e.str(body.subject.common_name);
    e.str(body.subject.organization);
    e.opt_str(body.subject.organizational_unit);
    e.opt_str(body.subject.locality);
    e.opt_str(body.subject.state_region);
    e.str(body.subject.country);
    e.opt_str(body.subject.email);
    e.fixed(body.subject_public_key.bytes);
    e.fixed(body.issuer_fingerprint.bytes);
    e.i64(body.not_before);
    e.i64(body.not_after);
    e.u32(static_cast<uint32_t>(body.extensions.size()));
    for (const auto& [key, value] : body.extensions) {
        e.str(key);
        e.str(value);
    }
    return e.take();
}

Result<Bytes> canonical_encode(const CertificateBody& body) {
    if (auto check = check_body(body); !check) {
        return forward_failure<Bytes>(check);
    }
    return Result<Bytes>::success(serialize_body(body));
}

namespace {

CertificateBody decode_body_inner(enc::Decoder& d) {
    CertificateBody body;
    body.serial.bytes = d.fixed<16>();
    body.role = static_cast<CertificateRole>(d.u8());
    body.subject.common_name = d.str();
    body.subject.organization = d.str();
    body.subject.organizational_unit = d.opt_str();
    body.subject.locality = d.opt_str();
    body.subject.state_region = d.opt_str();
    body.subject.country = d.str();
    body.subject.email = d.opt_str();
    body.subject_public_key.bytes = d.fixed<32>();
    body.issuer_fingerprint.bytes = d.fixed<32>();
    body.not_before = d.i64();
    body.not_after = d.i64();
    uint32_t ext_count = d.u32();
    for (uint32_t i = 0; i < ext_count && !d.failed(); ++i) {
        std::string key = d.str();
        std::string value = d.str();
        body.extensions.emplace(std::move(key), std::move(value));
    }
    return body;
}

bool role_in_range(CertificateRole role) {
    return role == CertificateRole::Root || role == CertificateRole::Intermediate ||
           role == CertificateRole::Developer;
}

}  // namespace

Result<CertificateBody> decode_body(ByteSpan data) {
    enc::Decoder d(data);
    CertificateBody body = decode_body_inner(d);
    if (!d.done() || !role_in_range(body.role)) {
        return Result<CertificateBody>::failure(Err::MalformedInput, "malformed certificate body");
    }
    return Result<CertificateBody>::success(std::move(body));
}

std::optional<TrustLevel> Certificate::trust_level() const {
    auto it = body.extensions.find(std::string(kTrustLevelExtension));
    if (it == body.extensions.end()) {
        return std::nullopt;
    }
    return trust_level_from_name(it->second);
}

std::optional<std::string> Certificate::threat_summary() const {
    auto it = body.extensions.find(std::string(kThreatSummaryExtension));
    if (it == body.extensions.end()) {
        return std::nullopt;
    }
    return it->second;
}

Fingerprint Certificate::subject_key_fingerprint() const {
    return fingerprint(body.subject_public_key);
}

Bytes serialize_certificate(const Certificate& cert) {
    enc::Encoder e;
    Bytes body_bytes = serialize_body(cert.body);
    e.bytes(body_bytes);
    e.fixed(cert.signature.bytes);
    return e.take();
}

Result<Certificate> decode_certificate(ByteSpan data) {
    enc::Decoder d(data);
    Bytes body_bytes = d.bytes();
    Certificate cert;
    cert.signature.bytes = d.fixed<64>();
    if (!d.done()) {
        return Result<Certificate>::failure(Err::MalformedInput, "malformed certificate");
    }
    auto body = decode_body(body_bytes);
    if (!body) {
        return forward_failure<Certificate>(body);
    }
    cert.body = std::move(body.value);
    return Result<Certificate>::success(std::move(cert));
}

Result<Certificate> sign_certificate(const CertificateBody& body, const crypto::SigningKey& issuer_secret) {
    auto encoded = canonical_encode(body);
    if (!encoded) {
        return forward_failure<Certificate>(encoded);
    }
    Certificate cert;
    cert.body = body;
    cert.signature = crypto::sign(encoded.value, issuer_secret);
    return Result<Certificate>::success(std::move(cert));
}

Result<void> verify_certificate_signature(const Certificate& cert, const crypto::VerifyKey& issuer_public) {
    Bytes encoded = serialize_body(cert.body);
    if (!crypto::verify(encoded, cert.signature, issuer_public)) {
        return Result<void>::failure(Err::SignatureInvalid, "certificate signature does not verify");
    }
    return Result<void>::success();
}

Fingerprint fingerprint(const crypto::VerifyKey& key) {
    return Fingerprint{crypto::sha256(ByteSpan(key.bytes.data(), key.bytes.size()))};
}

Bytes serialize_chain(const CertificateChain& chain) {
    enc::Encoder e;
    e.u32(static_cast<uint32_t>(chain.size()));
    for (const auto& cert : chain) {
        e.bytes(serialize_certificate(cert));
    }
    return e.take();
}

Result<CertificateChain> decode_chain(ByteSpan data) {
    enc::Decoder d(data);
    uint32_t count = d.u32();
    CertificateChain chain;
    for (uint32_t i = 0; i < count && !d.failed(); ++i) {
        Bytes cert_bytes = d.bytes();
        auto cert = decode_certificate(cert_bytes);
        if (!cert) {
            return forward_failure<CertificateChain>(cert);
        }
        chain.push_back(std::move(cert.value));
    }
    if (!d.done()) {
        return Result<CertificateChain>::failure(Err::MalformedInput, "malformed certificate chain");
    }
    return Result<CertificateChain>::success(std::move(chain));
}

ChainReport validate_chain(const CertificateChain& chain, const std::vector<Certificate>& anchors,
                           Timestamp now) {
    ChainReport report;
    if (chain.empty()) {
        report.first_problem = Err::RoleOrderViolation;
        return report;
    }

    const size_t n = chain.size();
    for (size_t i = 0; i < n; ++i) {
        const Certificate& cert = chain[i];
        const bool last = (i + 1 == n);
        LinkReport link;

        // Role ordering: Developer only at the leaf, Root only at the end,
        // Intermediate everywhere in between; plus issuer linkage by fingerprint.
        bool role_ok = true;
        if (last) {
            role_ok = cert.body.role == CertificateRole::Root;
        } else if (i == 0) {
            role_ok = cert.body.role == CertificateRole::Developer ||
                      cert.body.role == CertificateRole::Intermediate;
        } else {
            role_ok = cert.body.role == CertificateRole::Intermediate;
        }
        const Certificate& issuer = last ? cert : chain[i + 1];
        if (cert.body.issuer_fingerprint != fingerprint(issuer.body.subject_public_key)) {
            role_ok = false;
        }
        link.role_ok = role_ok;
        if (!role_ok) {
            link.problems.push_back(Err::RoleOrderViolation);
        }

        link.validity_ok = true;
        if (now < cert.body.not_before) {
            link.validity_ok = false;
            link.problems.push_back(Err::NotYetValid);
        } else if (now > cert.body.not_after) {
            link.validity_ok = false;
            link.problems.push_back(Err::Expired);
        }

        link.signature_ok =
            verify_certificate_signature(cert, issuer.body.subject_public_key).ok();
        if (!link.signature_ok) {
            link.problems.push_back(Err::SignatureInvalid);
        }

        report.links.push_back(std::move(link));
    }

    const Certificate& root = chain.back();
    report.anchor_ok = false;
    for (const auto& anchor : anchors) {
        if (anchor == root) {
            report.anchor_ok = true;
            break;
        }
    }

    report.ok = report.anchor_ok;
    for (const auto& link : report.links) {
        if (!link.problems.empty()) {
            report.ok = false;
            if (report.first_problem == Err::None) {
                report.first_problem = link.problems.front();
            }
        }
    }
    if (report.first_problem == Err::None && !report.anchor_ok) {
        report.first_problem = Err::UnknownAnchor;
    }
    return report;
}

Result<void> write_certificate_file(const std::filesystem::path& path, const Certificate& cert) {
    Bytes payload = serialize_certificate(cert);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        return Result<void>::failure(Err::IoError, "cannot open " + path.string());
    }
    out.write(reinterpret_cast<const char*>(kCertificateMagic.data()), kCertificateMagic.size());
    out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (!out) {
        return Result<void>::failure(Err::IoError, "write failed: " + path.string());
    }
    return Result<void>::success();
}

Result<Certificate> read_certificate_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return Result<Certificate>::failure(Err::IoError, "cannot open " + path.string());
    }
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < kCertificateMagic.size() ||
        !std::equal(kCertificateMagic.begin(), kCertificateMagic.end(), data.begin())) {
        return Result<Certificate>::failure(Err::MalformedInput,
                                            "not a certificate file: " + path.string());
    }
    return decode_certificate(ByteSpan(data).subspan(kCertificateMagic.size()));
}

std::string certificate_to_json(const Certificate& cert) {
    nlohmann::json subject = {
        {"common_name", cert.body.subject.common_name},
        {"organization", cert.body.subject.organization},
        {"country", cert.body.subject.country},
    };
    if (cert.body.subject.organizational_unit) subject["organizational_unit"] = *cert.body.subject.organizational_unit;
    if (cert.body.subject.locality) subject["locality"] = *cert.body.subject.locality;
    if (cert.body.subject.state_region) subject["state_region"] = *cert.body.subject.state_region;
    if (cert.body.subject.email) subject["email"] = *cert.body.subject.email;

    nlohmann::json j = {
        {"serial", cert.body.serial.hex()},
        {"role", to_string(cert.body.role)},
        {"subject", subject},
        {"subject_public_key", to_hex(cert.body.subject_public_key.bytes)},
        {"issuer_fingerprint", cert.body.issuer_fingerprint.hex()},
        {"not_before", cert.body.not_before},
        {"not_after", cert.body.not_after},
        {"extensions", cert.body.extensions},
        {"signature", to_hex(cert.signature.bytes)},
    };
    return j.dump(2);
}

}  // namespace dcm::trust
