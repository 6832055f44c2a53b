// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "dcm/common.hpp"

namespace dcm::crypto {

/// Idempotent library initialization; every entry point calls it.
void ensure_init();

Hash32 sha256(ByteSpan data);

struct VerifyKey {
    std::array<uint8_t, 32> bytes{};
    auto operator<=>(const VerifyKey&) const = default;
};

struct SigningKey {
    std::array<uint8_t, 64> bytes{};
    [[nodiscard]] VerifyKey verify_key() const;
    auto operator<=>(const SigningKey&) const = default;
};

struct Signature {
    std::array<uint8_t, 64> bytes{};
    auto operator<=>(const Signature&) const = default;
};

struct KeyPair {
    SigningKey secret;
    VerifyKey public_key;
};

KeyPair generate_keypair();

/// Deterministic keypair from a 32-byte seed; scenario and test fixtures only.
KeyPair keypair_from_seed(const Hash32& seed);

Signature sign(ByteSpan message, const SigningKey& key);
bool verify(ByteSpan message, const Signature& signature, const VerifyKey& key);

}  // namespace dcm::crypto
