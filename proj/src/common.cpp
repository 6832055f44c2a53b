// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/common.hpp"

namespace dcm {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
}  // namespace

std::string to_hex(ByteSpan data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

std::optional<Bytes> bytes_from_hex(std::string_view text) {
    if (text.size() % 2 != 0) {
        return std::nullopt;
    }
    Bytes out;
    out.reserve(text.size() / 2);
    for (size_t i = 0; i < text.size(); i += 2) {
        int hi = hex_nibble(text[i]);
        int lo = hex_nibble(text[i + 1]);
        if (hi < 0 || lo < 0) {
            return std::nullopt;
        }
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

Serial Serial::from_u64(uint64_t value) {
    Serial s;
    for (int i = 0; i < 8; ++i) {
        s.bytes[15 - i] = static_cast<uint8_t>(value >> (8 * i));
    }
    return s;
}

Serial Serial::next() const {
    Serial s = *this;
    for (int i = 15; i >= 0; --i) {
        if (++s.bytes[i] != 0) {
            break;
        }
    }
    return s;
}

std::optional<Serial> Serial::from_hex(std::string_view text) {
    auto raw = array_from_hex<16>(text);
    if (!raw) {
        return std::nullopt;
    }
    return Serial{*raw};
}

std::optional<Fingerprint> Fingerprint::from_hex(std::string_view text) {
    auto raw = array_from_hex<32>(text);
    if (!raw) {
        return std::nullopt;
    }
    return Fingerprint{*raw};
}

const char* to_string(Err code) {
    switch (code) {
        case Err::None: return "ok";
        case Err::InvalidBody: return "InvalidBody";
        case Err::InvalidIdentity: return "InvalidIdentity";
        case Err::SignatureInvalid: return "SignatureInvalid";
        case Err::UnknownAnchor: return "UnknownAnchor";
        case Err::Expired: return "Expired";
        case Err::NotYetValid: return "NotYetValid";
        case Err::RoleOrderViolation: return "RoleOrderViolation";
        case Err::NotARoot: return "NotARoot";
        case Err::NotAnIntermediate: return "NotAnIntermediate";
        case Err::CtLogUnreachable: return "CtLogUnreachable";
        case Err::UnknownSerial: return "UnknownSerial";
        case Err::AlreadyRevoked: return "AlreadyRevoked";
        case Err::NoActiveCertificate: return "NoActiveCertificate";
        case Err::DuplicatePath: return "DuplicatePath";
        case Err::EmptyPackage: return "EmptyPackage";
        case Err::KeyMismatch: return "KeyMismatch";
        case Err::NotADeveloperCert: return "NotADeveloperCert";
        case Err::MissingMetadata: return "MissingMetadata";
        case Err::MalformedMetadata: return "MalformedMetadata";
        case Err::DigestMismatch: return "DigestMismatch";
        case Err::Revoked: return "Revoked";
        case Err::RevocationUnavailable: return "RevocationUnavailable";
        case Err::MissingTrustLevel: return "MissingTrustLevel";
        case Err::Unreachable: return "Unreachable";
        case Err::BadResponderSignature: return "BadResponderSignature";
        case Err::StaleResponse: return "StaleResponse";
        case Err::SizeOutOfRange: return "SizeOutOfRange";
        case Err::IndexOutOfRange: return "IndexOutOfRange";
        case Err::DuplicateEventId: return "DuplicateEventId";
        case Err::BadCursor: return "BadCursor";
        case Err::ConfigInvalid: return "ConfigInvalid";
        case Err::MalformedInput: return "MalformedInput";
        case Err::IoError: return "IoError";
    }
    return "unknown";
}

}  // namespace dcm
