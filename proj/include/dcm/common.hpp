// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dcm {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;
using Hash32 = std::array<uint8_t, 32>;

/// Seconds since the Unix epoch, UTC.
using Timestamp = int64_t;

constexpr int64_t kSecondsPerDay = 86'400;

std::string to_hex(ByteSpan data);
std::optional<Bytes> bytes_from_hex(std::string_view text);

template <size_t N>
std::string to_hex(const std::array<uint8_t, N>& bytes) {
    return to_hex(ByteSpan(bytes.data(), bytes.size()));
}

template <size_t N>
std::optional<std::array<uint8_t, N>> array_from_hex(std::string_view text) {
    auto raw = bytes_from_hex(text);
    if (!raw || raw->size() != N) {
        return std::nullopt;
    }
    std::array<uint8_t, N> out{};
    std::copy(raw->begin(), raw->end(), out.begin());
    return out;
}

/// 128-bit issuance serial, big-endian. Unique within one issuer's registry.
struct Serial {
    std::array<uint8_t, 16> bytes{};

    static Serial from_u64(uint64_t value);
    [[nodiscard]] Serial next() const;
    [[nodiscard]] std::string hex() const { return to_hex(bytes); }
    static std::optional<Serial> from_hex(std::string_view text);

    auto operator<=>(const Serial&) const = default;
};

/// 32-byte digest of a public key's raw bytes; identifies issuers and developers.
struct Fingerprint {
    Hash32 bytes{};

    [[nodiscard]] std::string hex() const { return to_hex(bytes); }
    static std::optional<Fingerprint> from_hex(std::string_view text);

    auto operator<=>(const Fingerprint&) const = default;
};

enum class Err : uint8_t {
    None = 0,
    // certificates and chains
    InvalidBody,
    InvalidIdentity,
    SignatureInvalid,
    UnknownAnchor,
    Expired,
    NotYetValid,
    RoleOrderViolation,
    // authority
    NotARoot,
    NotAnIntermediate,
    CtLogUnreachable,
    UnknownSerial,
    AlreadyRevoked,
    NoActiveCertificate,
    // packages
    DuplicatePath,
    EmptyPackage,
    KeyMismatch,
    NotADeveloperCert,
    MissingMetadata,
    MalformedMetadata,
    // verification
    DigestMismatch,
    Revoked,
    RevocationUnavailable,
    MissingTrustLevel,
    // revocation client
    Unreachable,
    BadResponderSignature,
    StaleResponse,
    // transparency log
    SizeOutOfRange,
    IndexOutOfRange,
    // threat exchange
    DuplicateEventId,
    BadCursor,
    // scenarios / general
    ConfigInvalid,
    MalformedInput,
    IoError,
};

const char* to_string(Err code);

template <typename T>
struct [[nodiscard]] Result {
    Err code = Err::None;
    std::string message;
    T value{};

    [[nodiscard]] bool ok() const { return code == Err::None; }
    explicit operator bool() const { return ok(); }

    static Result success(T value) {
        Result r;
        r.value = std::move(value);
        return r;
    }
    static Result failure(Err code, std::string message = {}) {
        Result r;
        r.code = code;
        r.message = std::move(message);
        return r;
    }
};

template <>
struct [[nodiscard]] Result<void> {
    Err code = Err::None;
    std::string message;

    [[nodiscard]] bool ok() const { return code == Err::None; }
    explicit operator bool() const { return ok(); }

    static Result success() { return {}; }
    static Result failure(Err code, std::string message = {}) { return {code, std::move(message)}; }
};

/// Carries an error from one Result type to another.
template <typename T, typename U>
Result<T> forward_failure(const Result<U>& from) {
    return Result<T>::failure(from.code, from.message);
}

}  // namespace dcm
