// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/revocation.hpp"

#include "dcm/encoding.hpp"

namespace dcm::revocation {

const char* to_string(CertStatus status) {
    switch (status) {
        case CertStatus::Good: return "good";
        case CertStatus::Unknown: return "unknown";
        case CertStatus::Revoked: return "revoked";
    }
    return "?";
}

Bytes serialize_request(const StatusRequest& request) {
    enc::Encoder e;
    e.fixed(request.issuer_fingerprint.bytes);
    e.fixed(request.serial.bytes);
    return e.take();
}

Result<StatusRequest> decode_request(ByteSpan data) {
    enc::Decoder d(data);
    StatusRequest request;
    request.issuer_fingerprint.bytes = d.fixed<32>();
    request.serial.bytes = d.fixed<16>();
    if (!d.done()) {
        return Result<StatusRequest>::failure(Err::MalformedInput, "malformed status request");
    }
    return Result<StatusRequest>::success(request);
}

Bytes response_signing_payload(const StatusResponse& response) {
    enc::Encoder e;
    e.u8(static_cast<uint8_t>(response.status));
    e.u8(response.revoked_at.has_value() ? 1 : 0);
    if (response.revoked_at) {
        e.i64(*response.revoked_at);
    }
    e.u8(response.reason.has_value() ? 1 : 0);
    if (response.reason) {
        e.u8(static_cast<uint8_t>(*response.reason));
    }
    e.i64(response.produced_at);
    return e.take();
}

Bytes serialize_response(const StatusResponse& response) {
    enc::Encoder e;
    Bytes body = response_signing_payload(response);
    e.bytes(body);
    e.fixed(response.responder_signature.bytes);
    return e.take();
}

Result<StatusResponse> decode_response(ByteSpan data) {
    using Out = Result<StatusResponse>;
    enc::Decoder outer(data);
    Bytes body = outer.bytes();
    StatusResponse response;
    response.responder_signature.bytes = outer.fixed<64>();
    if (!outer.done()) {
        return Out::failure(Err::MalformedInput, "malformed status response");
    }

    enc::Decoder d(body);
    response.status = static_cast<CertStatus>(d.u8());
    if (d.u8() != 0) {
        response.revoked_at = d.i64();
    }
    if (d.u8() != 0) {
        response.reason = static_cast<authority::RevocationReason>(d.u8());
    }
    response.produced_at = d.i64();
    if (!d.done() || static_cast<uint8_t>(response.status) > 2) {
        return Out::failure(Err::MalformedInput, "malformed status response body");
    }
    return Out::success(response);
}

RegistryView registry_view(const authority::CaState& ca) {
    RegistryView view;
    view.issuer = ca.fingerprint();
    for (const auto& [serial, record] : ca.issued) {
        view.issued.insert(serial);
    }
    view.revoked = ca.revoked;
    return view;
}

StatusResponse serve_status(const StatusRequest& request, const RegistryView& view,
                            const crypto::SigningKey& responder_key, Timestamp now) {
    StatusResponse response;
    response.produced_at = now;
    if (request.issuer_fingerprint != view.issuer || !view.issued.contains(request.serial)) {
        response.status = CertStatus::Unknown;
    } else if (auto it = view.revoked.find(request.serial); it != view.revoked.end()) {
        response.status = CertStatus::Revoked;
        response.revoked_at = it->second.revoked_at;
        response.reason = it->second.reason;
    } else {
        response.status = CertStatus::Good;
    }
    response.responder_signature = crypto::sign(response_signing_payload(response), responder_key);
    return response;
}

Crl build_crl(const RegistryView& view, Timestamp now, const crypto::SigningKey& issuer_key) {
    Crl crl;
    crl.issuer_fingerprint = view.issuer;
    crl.issued_at = now;
    for (const auto& [serial, record] : view.revoked) {  // std::map: already serial-sorted
        crl.entries.push_back({serial, record.revoked_at, record.reason});
    }
    enc::Encoder e;
    e.fixed(crl.issuer_fingerprint.bytes);
    e.i64(crl.issued_at);
    e.u32(static_cast<uint32_t>(crl.entries.size()));
    for (const auto& entry : crl.entries) {
        e.fixed(entry.serial.bytes);
        e.i64(entry.revoked_at);
        e.u8(static_cast<uint8_t>(entry.reason));
    }
    crl.signature = crypto::sign(e.view(), issuer_key);
    return crl;
}

namespace {
Bytes crl_signing_payload(const Crl& crl) {
    enc::Encoder e;
    e.fixed(crl.issuer_fingerprint.bytes);
    e.i64(crl.issued_at);
    e.u32(static_cast<uint32_t>(crl.entries.size()));
    for (const auto& entry : crl.entries) {
        e.fixed(entry.serial.bytes);
        e.i64(entry.revoked_at);
        e.u8(static_cast<uint8_t>(entry.reason));
    }
    return e.take();
}
}  // namespace

Result<void> verify_crl(const Crl& crl, const crypto::VerifyKey& issuer_key) {
    if (!crypto::verify(crl_signing_payload(crl), crl.signature, issuer_key)) {
        return Result<void>::failure(Err::SignatureInvalid, "CRL signature does not verify");
    }
    return Result<void>::success();
}

bool crl_contains(const Crl& crl, const Serial& serial) {
    for (const auto& entry : crl.entries) {
        if (entry.serial == serial) {
            return true;
        }
    }
    return false;
}

Bytes serialize_crl(const Crl& crl) {
    enc::Encoder e;
    e.bytes(crl_signing_payload(crl));
    e.fixed(crl.signature.bytes);
    return e.take();
}

Result<Crl> decode_crl(ByteSpan data) {
    using Out = Result<Crl>;
    enc::Decoder outer(data);
    Bytes body = outer.bytes();
    Crl crl;
    crl.signature.bytes = outer.fixed<64>();
    if (!outer.done()) {
        return Out::failure(Err::MalformedInput, "malformed CRL");
    }
    enc::Decoder d(body);
    crl.issuer_fingerprint.bytes = d.fixed<32>();
    crl.issued_at = d.i64();
    uint32_t count = d.u32();
    for (uint32_t i = 0; i < count && !d.failed(); ++i) {
        CrlEntry entry;
        entry.serial.bytes = d.fixed<16>();
        entry.revoked_at = d.i64();
        entry.reason = static_cast<authority::RevocationReason>(d.u8());
        crl.entries.push_back(entry);
    }
    if (!d.done()) {
        return Out::failure(Err::MalformedInput, "malformed CRL body");
    }
    return Out::success(std::move(crl));
}

Result<StatusResponse> RegistrySource::fetch(const StatusRequest& request) {
    Timestamp now = clock_();
    for (const RegistryView& view : registries_()) {
        if (view.issuer == request.issuer_fingerprint) {
            return Result<StatusResponse>::success(serve_status(request, view, responder_key_, now));
        }
    }
    StatusResponse response;
    response.status = CertStatus::Unknown;
    response.produced_at = now;
    response.responder_signature = crypto::sign(response_signing_payload(response), responder_key_);
    return Result<StatusResponse>::success(response);
}

Result<StatusResponse> Client::check(const Serial& serial, const Fingerprint& issuer,
                                     Timestamp now) const {
    using Out = Result<StatusResponse>;
    if (!source) {
        return Out::failure(Err::Unreachable, "no status endpoint configured");
    }
    auto response = source->fetch(StatusRequest{issuer, serial});
    if (!response) {
        return response;
    }
    if (!crypto::verify(response_signing_payload(response.value),
                        response.value.responder_signature, responder_key)) {
        return Out::failure(Err::BadResponderSignature, "status response signature does not verify");
    }
    if (now - response.value.produced_at > max_age) {
        return Out::failure(Err::StaleResponse, "status response is older than max_age");
    }
    return response;
}

}  // namespace dcm::revocation
