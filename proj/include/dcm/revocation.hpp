// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// Live certificate-status service and CRL snapshots. A responder answers
// good / unknown / revoked over a read-only view of a CA registry; the client
// verifies the responder signature and response freshness.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>

#include "dcm/authority.hpp"
#include "dcm/common.hpp"
#include "dcm/crypto.hpp"

namespace dcm::revocation {

enum class CertStatus : uint8_t { Good = 0, Unknown = 1, Revoked = 2 };

const char* to_string(CertStatus status);

struct StatusRequest {
    Fingerprint issuer_fingerprint;
    Serial serial{};

    bool operator==(const StatusRequest&) const = default;
};

Bytes serialize_request(const StatusRequest& request);
Result<StatusRequest> decode_request(ByteSpan data);

struct StatusResponse {
    CertStatus status = CertStatus::Unknown;
    std::optional<Timestamp> revoked_at;
    std::optional<authority::RevocationReason> reason;
    Timestamp produced_at = 0;
    crypto::Signature responder_signature;  // over the canonical body fields above

    bool operator==(const StatusResponse&) const = default;
};

Bytes response_signing_payload(const StatusResponse& response);
Bytes serialize_response(const StatusResponse& response);
Result<StatusResponse> decode_response(ByteSpan data);

/// Immutable snapshot of one issuer's registry.
struct RegistryView {
    Fingerprint issuer;
    std::set<Serial> issued;
    std::map<Serial, authority::RevocationRecord> revoked;
};

RegistryView registry_view(const authority::CaState& ca);

/// good when issued and unrevoked, revoked with record data, unknown when this
/// issuer never issued the serial (or the request names a different issuer).
StatusResponse serve_status(const StatusRequest& request, const RegistryView& view,
                            const crypto::SigningKey& responder_key, Timestamp now);

struct CrlEntry {
    Serial serial{};
    Timestamp revoked_at = 0;
    authority::RevocationReason reason = authority::RevocationReason::TrustLevelChange;

    bool operator==(const CrlEntry&) const = default;
};

struct Crl {
    Fingerprint issuer_fingerprint;
    Timestamp issued_at = 0;
    std::vector<CrlEntry> entries;  // sorted by serial
    crypto::Signature signature;

    bool operator==(const Crl&) const = default;
};

Crl build_crl(const RegistryView& view, Timestamp now, const crypto::SigningKey& issuer_key);
Result<void> verify_crl(const Crl& crl, const crypto::VerifyKey& issuer_key);
bool crl_contains(const Crl& crl, const Serial& serial);

Bytes serialize_crl(const Crl& crl);
Result<Crl> decode_crl(ByteSpan data);

/// Transport used by the status client; in-process and HTTP versions exist.
class StatusSource {
  public:
    virtual ~StatusSource() = default;
    virtual Result<StatusResponse> fetch(const StatusRequest& request) = 0;
};

/// Serves straight from registry snapshots; picks the view matching the
/// requested issuer, answering unknown when none does.
class RegistrySource : public StatusSource {
  public:
    RegistrySource(std::function<std::vector<RegistryView>()> registries,
                   crypto::SigningKey responder_key, std::function<Timestamp()> clock)
        : registries_(std::move(registries)),
          responder_key_(responder_key),
          clock_(std::move(clock)) {}

    Result<StatusResponse> fetch(const StatusRequest& request) override;

  private:
    std::function<std::vector<RegistryView>()> registries_;
    crypto::SigningKey responder_key_;
    std::function<Timestamp()> clock_;
};

inline constexpr Timestamp kDefaultMaxResponseAge = 600;

/// Verifying status client: checks the responder signature and rejects
/// responses produced more than max_age seconds before `now`.
struct Client {
    std::shared_ptr<StatusSource> source;
    crypto::VerifyKey responder_key;
    Timestamp max_age = kDefaultMaxResponseAge;

    [[nodiscard]] Result<StatusResponse> check(const Serial& serial, const Fingerprint& issuer,
                                               Timestamp now) const;
};

}  // namespace dcm::revocation
